#include "keyedge/records.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "keyedge/error.hpp"

namespace keyedge {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<const char*, 4> kHeightKeys = {"h_a", "h_b", "h_c", "h_d"};
constexpr std::array<const char*, 4> kRatioKeys = {"r_ab", "r_bc", "r_cd", "r_da"};
constexpr std::array<const char*, 4> kSigmaKeys = {"sigma_ab", "sigma_bc", "sigma_cd", "sigma_da"};

std::array<double, 4> forward_ratios(const ObjectRatios& r) { return {r.ab, r.bc, r.cd, r.da}; }

template <typename Fn>
void for_each_json_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(number, 0, std::string("invalid JSON: ") + e.what());
    }
    try {
      fn(j);
    } catch (const Json::exception& e) {
      throw ParseError(number, 0, std::string("bad record: ") + e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(number, 0, e.what());
    }
  }
}

double num(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  return j.at(key).get<double>();
}

std::optional<double> opt_num(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

Json box_json(const Box2D& b) { return Json::array({b.left, b.top, b.right, b.bottom}); }

Box2D box_from(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 4) throw Error(ErrorCode::ParseError, "bbox needs 4 values");
  return Box2D{v[0], v[1], v[2], v[3]};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvRow {
 public:
  explicit CsvRow(std::ostream& out) : out_(out) {}
  ~CsvRow() { out_ << '\n'; }
  CsvRow& text(const std::string& s) { return cell(csv_escape(s)); }
  CsvRow& number(double v) { return cell(format_double(v)); }
  CsvRow& number(std::optional<double> v) { return cell(v ? format_double(*v) : std::string()); }
  CsvRow& integer(long long v) { return cell(std::to_string(v)); }

 private:
  CsvRow& cell(const std::string& s) {
    if (!first_) out_ << ',';
    first_ = false;
    out_ << s;
    return *this;
  }
  std::ostream& out_;
  bool first_ = true;
};

const char* yaw_fusion_name(YawFusion y) {
  switch (y) {
    case YawFusion::WeightedCircularMean: return "weighted_circular_mean";
  }
  return "unknown";
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

RatioRecord make_ratio_record(std::string id, const BoxPose3D& pose,
                              const KeyedgeObservation& observation) {
  RatioRecord r;
  r.id = std::move(id);
  r.dims = pose.dims;
  r.center = pose.center;
  r.angles = from_egocentric(pose.yaw, viewing_angle(pose.center));
  r.d_obj = pose.center.z;
  for (Keyedge k : kAllKeyedges) r.heights[index_of(k)] = observation[k].visual_height;
  r.ratios = keyedge_ratios(observation);
  r.camera_centric = camera_centric_view(observation);
  return r;
}

RatioRecord make_ratio_record(std::string id, std::string frame, const GroundTruthObject& gt) {
  RatioRecord r = make_ratio_record(std::move(id), gt.pose, gt.observation);
  r.frame = std::move(frame);
  r.class_name = gt.label.class_name;
  r.bbox = gt.label.bbox;
  r.file_alpha = gt.label.alpha;
  r.truncated = gt.label.truncated;
  r.occluded = gt.label.occluded;
  r.flagged = gt.label.flagged();
  return r;
}

std::array<RatioWithSigma, 4> record_tuples(const RatioRecord& record) {
  return tuples_with_sigma(record.ratios, record.ratio_sigma.value_or(std::array<double, 4>{}));
}

std::vector<RatioRecord> read_ratio_records(std::istream& in) {
  std::vector<RatioRecord> records;
  for_each_json_line(in, [&](const Json& j) {
    RatioRecord r;
    r.id = j.contains("id") ? j.at("id").get<std::string>() : std::to_string(records.size());
    r.frame = j.value("frame", std::string());
    r.class_name = j.value("class", std::string("Car"));
    r.dims = Dimensions{num(j, "l"), num(j, "w"), j.value("h", 0.0)};
    r.center = Vec3{j.value("x", 0.0), j.value("y", 0.0), j.value("z", 0.0)};
    r.angles = AngleTriple{j.value("theta", 0.0), j.value("alpha", 0.0), j.value("gamma", 0.0)};
    r.d_obj = j.value("d_obj", r.center.z);
    for (std::size_t i = 0; i < 4; ++i) r.heights[i] = j.value(kHeightKeys[i], 0.0);

    const bool has_cc = j.contains("r21") && j.contains("group");
    if (has_cc) {
      r.camera_centric = CameraCentricRatios{num(j, "r21"), num(j, "r41"), num(j, "r32"),
                                             num(j, "r34"),
                                             AllocentricGroup{j.at("group").get<int>()}};
    }
    if (j.contains("r_ab")) {
      r.ratios = ObjectRatios{num(j, "r_ab"), num(j, "r_bc"), num(j, "r_cd"), num(j, "r_da")};
      if (!has_cc && j.contains("group")) {
        r.camera_centric = to_camera_centric(r.ratios, AllocentricGroup{j.at("group").get<int>()});
      }
    } else if (has_cc) {
      r.ratios = to_object_ratios(r.camera_centric);
    } else {
      throw Error(ErrorCode::ParseError, "record has neither r_ab..r_da nor r21..r34 with group");
    }
    if (j.contains("sigma_ab")) {
      std::array<double, 4> s{};
      for (std::size_t i = 0; i < 4; ++i) s[i] = num(j, kSigmaKeys[i]);
      r.ratio_sigma = s;
    }
    if (j.contains("bbox") && !j.at("bbox").is_null()) r.bbox = box_from(j.at("bbox"));
    r.file_alpha = opt_num(j, "file_alpha");
    r.truncated = j.value("truncated", 0.0);
    r.occluded = j.value("occluded", 0);
    r.flagged = j.value("flagged", false);
    records.push_back(std::move(r));
  });
  return records;
}

void write_ratio_records_jsonl(std::ostream& out, std::span<const RatioRecord> records) {
  for (const RatioRecord& r : records) {
    Json j;
    j["id"] = r.id;
    j["frame"] = r.frame;
    j["class"] = r.class_name;
    j["l"] = r.dims.length;
    j["w"] = r.dims.width;
    j["h"] = r.dims.height;
    j["x"] = r.center.x;
    j["y"] = r.center.y;
    j["z"] = r.center.z;
    j["theta"] = r.angles.egocentric;
    j["alpha"] = r.angles.allocentric;
    j["gamma"] = r.angles.viewing;
    j["group"] = r.camera_centric.group.id;
    j["d_obj"] = r.d_obj;
    for (std::size_t i = 0; i < 4; ++i) j[kHeightKeys[i]] = r.heights[i];
    const auto fr = forward_ratios(r.ratios);
    for (std::size_t i = 0; i < 4; ++i) j[kRatioKeys[i]] = fr[i];
    j["r21"] = r.camera_centric.r21;
    j["r41"] = r.camera_centric.r41;
    j["r32"] = r.camera_centric.r32;
    j["r34"] = r.camera_centric.r34;
    if (r.ratio_sigma) {
      for (std::size_t i = 0; i < 4; ++i) j[kSigmaKeys[i]] = (*r.ratio_sigma)[i];
    }
    if (r.bbox) j["bbox"] = box_json(*r.bbox);
    if (r.file_alpha) j["file_alpha"] = *r.file_alpha;
    j["truncated"] = r.truncated;
    j["occluded"] = r.occluded;
    j["flagged"] = r.flagged;
    out << j.dump() << '\n';
  }
}

void write_ratio_records_csv(std::ostream& out, std::span<const RatioRecord> records) {
  out << "id,frame,class,l,w,h,x,y,z,theta,alpha,gamma,group,d_obj,h_a,h_b,h_c,h_d,"
         "r_ab,r_bc,r_cd,r_da,r21,r41,r32,r34,sigma_ab,sigma_bc,sigma_cd,sigma_da,"
         "bbox_left,bbox_top,bbox_right,bbox_bottom,file_alpha,truncated,occluded,flagged\n";
  for (const RatioRecord& r : records) {
    CsvRow row(out);
    row.text(r.id).text(r.frame).text(r.class_name);
    row.number(r.dims.length).number(r.dims.width).number(r.dims.height);
    row.number(r.center.x).number(r.center.y).number(r.center.z);
    row.number(r.angles.egocentric).number(r.angles.allocentric).number(r.angles.viewing);
    row.integer(r.camera_centric.group.id).number(r.d_obj);
    for (double h : r.heights) row.number(h);
    for (double v : forward_ratios(r.ratios)) row.number(v);
    row.number(r.camera_centric.r21).number(r.camera_centric.r41);
    row.number(r.camera_centric.r32).number(r.camera_centric.r34);
    for (std::size_t i = 0; i < 4; ++i) {
      row.number(r.ratio_sigma ? std::optional<double>((*r.ratio_sigma)[i]) : std::nullopt);
    }
    if (r.bbox) {
      row.number(r.bbox->left).number(r.bbox->top).number(r.bbox->right).number(r.bbox->bottom);
    } else {
      for (int i = 0; i < 4; ++i) row.number(std::nullopt);
    }
    row.number(r.file_alpha).number(r.truncated).integer(r.occluded).integer(r.flagged ? 1 : 0);
  }
}

std::vector<SolveRecord> read_solve_records(std::istream& in) {
  std::vector<SolveRecord> records;
  for_each_json_line(in, [&](const Json& j) {
    SolveRecord r;
    r.id = j.at("id").get<std::string>();
    r.length = j.value("l", 0.0);
    r.width = j.value("w", 0.0);
    r.result.fused.depth = num(j, "d_fusion");
    r.result.fused.theta = num(j, "theta_fusion");
    for (const Json& m : j.at("estimates")) {
      WeightedEstimate w;
      w.estimate.reference = keyedge_from_char(m.at("reference").get<std::string>().at(0));
      w.estimate.theta = num(m, "theta");
      w.estimate.d_ref = num(m, "d_ref");
      w.estimate.d_obj = num(m, "d_obj");
      w.sigma_d = num(m, "sigma_d");
      w.weight = num(m, "weight");
      r.result.fused.members.push_back(w);
    }
    if (j.contains("rejected")) {
      for (const Json& m : j.at("rejected")) {
        RejectedTuple t;
        t.reference = keyedge_from_char(m.at("reference").get<std::string>().at(0));
        t.message = m.value("reason", std::string());
        r.result.rejected.push_back(t);
      }
    }
    records.push_back(std::move(r));
  });
  return records;
}

void write_solve_records_jsonl(std::ostream& out, std::span<const SolveRecord> records) {
  for (const SolveRecord& r : records) {
    Json j;
    j["id"] = r.id;
    j["l"] = r.length;
    j["w"] = r.width;
    j["d_fusion"] = r.result.fused.depth;
    j["theta_fusion"] = r.result.fused.theta;
    j["yaw_fusion"] = yaw_fusion_name(r.result.fused.yaw_fusion);
    Json estimates = Json::array();
    for (const WeightedEstimate& m : r.result.fused.members) {
      Json e;
      e["reference"] = std::string(1, to_char(m.estimate.reference));
      e["theta"] = m.estimate.theta;
      e["d_ref"] = m.estimate.d_ref;
      e["d_obj"] = m.estimate.d_obj;
      e["sigma_d"] = m.sigma_d;
      e["weight"] = m.weight;
      estimates.push_back(std::move(e));
    }
    j["estimates"] = std::move(estimates);
    Json rejected = Json::array();
    for (const RejectedTuple& t : r.result.rejected) {
      rejected.push_back(Json{{"reference", std::string(1, to_char(t.reference))},
                              {"reason", to_string(t.reason)}});
    }
    j["rejected"] = std::move(rejected);
    out << j.dump() << '\n';
  }
}

void write_solve_records_csv(std::ostream& out, std::span<const SolveRecord> records) {
  out << "id,l,w,d_fusion,theta_fusion,n_estimates";
  for (Keyedge k : kAllKeyedges) {
    const char c = to_char(k);
    for (const char* field : {"theta_", "d_ref_", "d_obj_", "sigma_d_", "weight_"}) {
      out << ',' << field << c;
    }
  }
  out << '\n';
  for (const SolveRecord& r : records) {
    CsvRow row(out);
    row.text(r.id).number(r.length).number(r.width);
    row.number(r.result.fused.depth).number(r.result.fused.theta);
    row.integer(static_cast<long long>(r.result.fused.members.size()));
    for (Keyedge k : kAllKeyedges) {
      const WeightedEstimate* found = nullptr;
      for (const WeightedEstimate& m : r.result.fused.members) {
        if (m.estimate.reference == k) found = &m;
      }
      if (found) {
        row.number(found->estimate.theta).number(found->estimate.d_ref);
        row.number(found->estimate.d_obj).number(found->sigma_d).number(found->weight);
      } else {
        for (int i = 0; i < 5; ++i) row.number(std::nullopt);
      }
    }
  }
}

std::vector<DetectionRecord> read_detections(std::istream& in) {
  std::vector<DetectionRecord> records;
  for_each_json_line(in, [&](const Json& j) {
    DetectionRecord d;
    d.box = box_from(j.at("bbox"));
    d.box.validate();
    d.confidence = num(j, "confidence");
    d.depth = num(j, "d_est");
    d.viewing_angle = opt_num(j, "gamma_est");
    d.frame = j.value("frame", std::string());
    records.push_back(std::move(d));
  });
  return records;
}

std::vector<GroundTruthRecord> read_ground_truth(std::istream& in) {
  std::vector<GroundTruthRecord> records;
  for_each_json_line(in, [&](const Json& j) {
    GroundTruthRecord g;
    g.box = box_from(j.at("bbox"));
    g.box.validate();
    g.depth = j.contains("d_gt") ? num(j, "d_gt") : num(j, "d_obj");
    g.viewing_angle = j.contains("gamma_gt") ? num(j, "gamma_gt") : num(j, "gamma");
    g.frame = j.value("frame", std::string());
    records.push_back(std::move(g));
  });
  return records;
}

void write_detections_jsonl(std::ostream& out, std::span<const DetectionRecord> records) {
  for (const DetectionRecord& d : records) {
    Json j;
    j["frame"] = d.frame;
    j["bbox"] = box_json(d.box);
    j["confidence"] = d.confidence;
    j["d_est"] = d.depth;
    if (d.viewing_angle) j["gamma_est"] = *d.viewing_angle;
    out << j.dump() << '\n';
  }
}

void write_ground_truth_jsonl(std::ostream& out, std::span<const GroundTruthRecord> records) {
  for (const GroundTruthRecord& g : records) {
    Json j;
    j["frame"] = g.frame;
    j["bbox"] = box_json(g.box);
    j["d_gt"] = g.depth;
    j["gamma_gt"] = g.viewing_angle;
    out << j.dump() << '\n';
  }
}

}  // namespace keyedge
