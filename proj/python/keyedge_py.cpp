#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "keyedge/error.hpp"
#include "keyedge/pipeline.hpp"

namespace py = pybind11;
using namespace keyedge;

namespace {

Keyedge edge_from(const std::string& name) {
  if (name.size() != 1) throw Error(ErrorCode::InvalidArgument, "keyedge must be one of a, b, c, d");
  return keyedge_from_char(name[0]);
}

std::string edge_name(Keyedge k) { return std::string(1, to_char(k)); }

BoxPose3D make_pose(double x, double y, double z, double length, double width, double height,
                    double yaw) {
  return BoxPose3D{Vec3{x, y, z}, Dimensions{length, width, height}, yaw};
}

py::dict pose_estimate_dict(const PoseEstimate& e) {
  py::dict d;
  d["reference"] = edge_name(e.reference);
  d["theta"] = e.theta;
  d["d_ref"] = e.d_ref;
  d["d_obj"] = e.d_obj;
  return d;
}

RatioTuple tuple_from(const py::tuple& t) {
  if (t.size() != 3) throw Error(ErrorCode::InvalidArgument, "tuple must be (reference, r1, r2)");
  return RatioTuple{edge_from(t[0].cast<std::string>()), t[1].cast<double>(), t[2].cast<double>()};
}

py::tuple tuple_to(const RatioTuple& t) { return py::make_tuple(edge_name(t.reference), t.r1, t.r2); }

}  // namespace

PYBIND11_MODULE(_keyedge, m) {
  m.doc() = "Keyedge-ratio geometry for monocular 3D box depth and yaw";

  py::register_exception<Error>(m, "KeyedgeError", PyExc_ValueError);

  py::class_<CameraIntrinsics>(m, "CameraIntrinsics")
      .def(py::init([](double focal, double cx, double cy) {
             CameraIntrinsics c{focal, cx, cy, std::nullopt};
             c.validate();
             return c;
           }),
           py::arg("focal"), py::arg("cx") = 0.0, py::arg("cy") = 0.0)
      .def_readonly("focal", &CameraIntrinsics::focal)
      .def_readonly("cx", &CameraIntrinsics::cx)
      .def_readonly("cy", &CameraIntrinsics::cy);

  py::class_<BoxPose3D>(m, "BoxPose3D")
      .def(py::init(&make_pose), py::arg("x"), py::arg("y"), py::arg("z"), py::arg("length"),
           py::arg("width"), py::arg("height"), py::arg("yaw"))
      .def_property_readonly("center", [](const BoxPose3D& p) {
        return py::make_tuple(p.center.x, p.center.y, p.center.z);
      })
      .def_property_readonly("dims", [](const BoxPose3D& p) {
        return py::make_tuple(p.dims.length, p.dims.width, p.dims.height);
      })
      .def_readonly("yaw", &BoxPose3D::yaw);

  m.def("keyedge_depths", [](const BoxPose3D& pose) {
    const KeyedgeGeometry g = keyedge_positions(pose);
    py::dict d;
    for (Keyedge k : kAllKeyedges) d[py::str(edge_name(k))] = g[k].z;
    return d;
  }, "Depth of each keyedge, keyed 'a'..'d'.");

  m.def("project_keyedges", [](const BoxPose3D& pose, const CameraIntrinsics& intr) {
    const KeyedgeObservation obs = project_keyedges(pose, intr);
    py::dict d;
    for (Keyedge k : kAllKeyedges) {
      py::dict e;
      e["depth"] = obs[k].depth;
      e["distance"] = obs[k].distance;
      e["visual_height"] = obs[k].visual_height;
      e["pixel_column"] = obs[k].pixel_column;
      d[py::str(edge_name(k))] = e;
    }
    return d;
  });

  m.def("keyedge_ratios", [](const BoxPose3D& pose, const CameraIntrinsics& intr) {
    const ObjectRatios r = keyedge_ratios(project_keyedges(pose, intr));
    py::dict d;
    d["r_ab"] = r.ab;
    d["r_bc"] = r.bc;
    d["r_cd"] = r.cd;
    d["r_da"] = r.da;
    return d;
  }, "Object-centric keyedge ratios of a projected box.");

  m.def("camera_centric_view", [](const BoxPose3D& pose, const CameraIntrinsics& intr) {
    const CameraCentricRatios cc = camera_centric_view(project_keyedges(pose, intr));
    py::dict d;
    d["r21"] = cc.r21;
    d["r41"] = cc.r41;
    d["r32"] = cc.r32;
    d["r34"] = cc.r34;
    d["group"] = cc.group.id;
    return d;
  });

  m.def("to_object_centric_tuples",
        [](double r21, double r41, double r32, double r34, int group) {
          const TupleSet ts =
              to_object_centric_tuples(CameraCentricRatios{r21, r41, r32, r34, {group}});
          py::list out;
          for (const RatioTuple& t : ts) out.append(tuple_to(t));
          return out;
        },
        py::arg("r21"), py::arg("r41"), py::arg("r32"), py::arg("r34"), py::arg("group"));

  m.def("object_centric_tuples", [](double ab, double bc, double cd, double da) {
    py::list out;
    for (const RatioTuple& t : object_centric_tuples(ObjectRatios{ab, bc, cd, da})) {
      out.append(tuple_to(t));
    }
    return out;
  }, py::arg("r_ab"), py::arg("r_bc"), py::arg("r_cd"), py::arg("r_da"));

  m.def("viewing_angle", [](double x, double z) { return viewing_angle(Vec3{x, 0.0, z}); },
        py::arg("x"), py::arg("z"));
  m.def("allocentric_group", [](double alpha) { return allocentric_group(alpha).id; });
  m.def("normalize_angle", &normalize_angle);
  m.def("from_egocentric", [](double theta, double gamma) {
    const AngleTriple a = from_egocentric(theta, gamma);
    return py::make_tuple(a.egocentric, a.allocentric, a.viewing);
  }, py::arg("theta"), py::arg("gamma"));
  m.def("from_allocentric", [](double alpha, double gamma) {
    const AngleTriple a = from_allocentric(alpha, gamma);
    return py::make_tuple(a.egocentric, a.allocentric, a.viewing);
  }, py::arg("alpha"), py::arg("gamma"));

  m.def("solve_tuple", [](const std::string& ref, double r1, double r2, double l, double w) {
    const YawDepth yd = solve_tuple(RatioTuple{edge_from(ref), r1, r2}, l, w);
    return py::make_tuple(yd.theta, yd.d_ref);
  }, py::arg("reference"), py::arg("r1"), py::arg("r2"), py::arg("length"), py::arg("width"),
        "Returns (theta, d_ref).");

  m.def("center_depth", [](double theta, double d_ref, const std::string& ref, double l, double w) {
    return center_depth(theta, d_ref, edge_from(ref), l, w);
  }, py::arg("theta"), py::arg("d_ref"), py::arg("reference"), py::arg("length"), py::arg("width"));

  m.def("solve_all", [](const std::vector<py::tuple>& tuples, double l, double w) {
    if (tuples.size() != 4) throw Error(ErrorCode::InvalidArgument, "need four tuples");
    TupleSet ts;
    for (std::size_t i = 0; i < 4; ++i) ts[i] = tuple_from(tuples[i]);
    const SolveResult r = solve_all(ts, l, w);
    py::list estimates;
    for (const PoseEstimate& e : r.estimates) estimates.append(pose_estimate_dict(e));
    py::list rejected;
    for (const RejectedTuple& t : r.rejected) {
      rejected.append(py::make_tuple(edge_name(t.reference), to_string(t.reason)));
    }
    return py::make_tuple(estimates, rejected);
  }, py::arg("tuples"), py::arg("length"), py::arg("width"),
        "tuples: four (reference, r1, r2). Returns (estimates, rejected).");

  m.def("depth_partials", [](const std::string& ref, double r1, double r2, double l, double w) {
    const DepthPartials p = depth_partials(RatioTuple{edge_from(ref), r1, r2}, l, w);
    return py::make_tuple(p.d_r1, p.d_r2);
  }, py::arg("reference"), py::arg("r1"), py::arg("r2"), py::arg("length"), py::arg("width"));

  m.def("propagate_sigma", [](double p1, double p2, double s1, double s2) {
    return propagate_sigma(DepthPartials{p1, p2}, s1, s2);
  });

  m.def("fuse", [](const std::vector<std::pair<double, double>>& depth_sigma,
                   const std::vector<double>& thetas) {
    std::vector<SigmaEstimate> members;
    for (std::size_t i = 0; i < depth_sigma.size(); ++i) {
      PoseEstimate e;
      e.d_obj = depth_sigma[i].first;
      e.theta = i < thetas.size() ? thetas[i] : 0.0;
      members.push_back(SigmaEstimate{e, depth_sigma[i].second});
    }
    const FusedEstimate f = fuse(members);
    py::list weights;
    for (const WeightedEstimate& w : f.members) weights.append(w.weight);
    return py::make_tuple(f.depth, f.theta, weights);
  }, py::arg("depth_sigma"), py::arg("thetas") = std::vector<double>{},
        "Inverse-sigma fusion of (depth, sigma) pairs. Returns (depth, theta, weights).");

  m.def("uncertainty_loss", &uncertainty_loss, py::arg("r"), py::arg("sigma"), py::arg("r_star"));

  m.def("iou_2d", [](const std::array<double, 4>& a, const std::array<double, 4>& b) {
    return iou_2d(Box2D{a[0], a[1], a[2], a[3]}, Box2D{b[0], b[1], b[2], b[3]});
  });

  m.def("arde", [](const std::vector<py::dict>& dets, const std::vector<py::dict>& gts,
                   double iou_min) {
    std::vector<DetectionRecord> d;
    for (const py::dict& x : dets) {
      const auto b = x["bbox"].cast<std::array<double, 4>>();
      DetectionRecord r{Box2D{b[0], b[1], b[2], b[3]}, x["confidence"].cast<double>(),
                        x["d_est"].cast<double>(), std::nullopt,
                        x.contains("frame") ? x["frame"].cast<std::string>() : std::string()};
      d.push_back(r);
    }
    std::vector<GroundTruthRecord> g;
    for (const py::dict& x : gts) {
      const auto b = x["bbox"].cast<std::array<double, 4>>();
      g.push_back(GroundTruthRecord{Box2D{b[0], b[1], b[2], b[3]}, x["d_gt"].cast<double>(),
                                    x.contains("gamma_gt") ? x["gamma_gt"].cast<double>() : 0.0,
                                    x.contains("frame") ? x["frame"].cast<std::string>()
                                                        : std::string()});
    }
    return arde(d, g, iou_min);
  }, py::arg("detections"), py::arg("ground_truth"), py::arg("iou_min") = kDefaultIouMin);

  m.def("parse_calib", [](const std::string& text) { return parse_calib(text); });
  m.def("parse_label_file", [](const std::string& text) {
    py::list out;
    for (const KittiLabel& l : parse_label_file(text)) {
      py::dict d;
      d["class"] = l.class_name;
      d["truncated"] = l.truncated;
      d["occluded"] = l.occluded;
      d["alpha"] = l.alpha;
      d["bbox"] = py::make_tuple(l.bbox.left, l.bbox.top, l.bbox.right, l.bbox.bottom);
      d["dims_hwl"] = py::make_tuple(l.height, l.width, l.length);
      d["location"] = py::make_tuple(l.location.x, l.location.y, l.location.z);
      d["rotation_y"] = l.rotation_y;
      out.append(d);
    }
    return out;
  });

  m.def("generate_scene", [](std::size_t count, std::uint64_t seed, std::pair<double, double> depth,
                             std::pair<double, double> gamma) {
    SceneConfig cfg;
    cfg.count = count;
    cfg.seed = seed;
    cfg.depth = Range{depth.first, depth.second};
    cfg.gamma = Range{gamma.first, gamma.second};
    return generate_scene(cfg);
  }, py::arg("count"), py::arg("seed"), py::arg("depth") = std::make_pair(5.0, 60.0),
        py::arg("gamma") = std::make_pair(-0.7, 0.7));

  m.def("sensitivity_csv", [](std::uint64_t seed, std::vector<double> noise_levels,
                              std::size_t trials) {
    SensitivityConfig cfg = default_sensitivity_config();
    cfg.seed = seed;
    cfg.noise_levels = std::move(noise_levels);
    cfg.trials_per_cell = trials;
    const auto rows = run_sensitivity(cfg);
    std::ostringstream out;
    write_sensitivity_csv(out, cfg.noise_kind, rows);
    return out.str();
  }, py::arg("seed"), py::arg("noise_levels"), py::arg("trials") = 200);
}
