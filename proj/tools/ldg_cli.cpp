// ldg: relax, sweep, classify-loop, lower-bound, ball-bound, diagnose.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ldg/balls.hpp"
#include "ldg/defects.hpp"
#include "ldg/diagnostics.hpp"
#include "ldg/experiment.hpp"
#include "ldg/io.hpp"
#include "ldg/manifold.hpp"

using namespace ldg;

namespace {

enum Exit { kOk = 0, kFailed = 1, kInvalid = 2 };

struct Common {
  std::string config;
  std::string out;
  bool deterministic = false;
  std::string eps_list;
  std::int64_t seed = -1;
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw Error(ErrorKind::InvalidParameter, "bad number in list: " + item);
    out.push_back(v);
  }
  return out;
}

Vec3 parse_point(const std::string& s) {
  const auto v = parse_list(s);
  if (v.size() < 2 || v.size() > 3) throw Error(ErrorKind::InvalidParameter, "points are x,y or x,y,z");
  return {v[0], v[1], v.size() == 3 ? v[2] : 0.0};
}

ExperimentConfig load_config(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : config_from_json(read_json(c.config));
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.deterministic) cfg.deterministic = true;
  if (!c.eps_list.empty()) cfg.eps = parse_list(c.eps_list);
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  validate(cfg);
  return cfg;
}

MaterialParams load_params(const Common& c) {
  return c.config.empty() ? derive_params(6, 1, 1, 1) : config_from_json(read_json(c.config)).params;
}

void emit(const json& j, const std::string& out_dir, const std::string& name) {
  std::cout << j.dump(2) << '\n';
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_json((std::filesystem::path(out_dir) / name).string(), j);
  }
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "experiment config (JSON)");
  app->add_option("--out", c.out, "output directory");
  app->add_flag("--deterministic", c.deterministic, "fixed-order reductions");
  app->add_option("--eps-list", c.eps_list, "comma-separated eps values, strictly decreasing");
  app->add_option("--seed", c.seed, "seed for the initial perturbation");
}

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::UndefinedShape: return "undefined-shape";
    case ErrorKind::ProjectionUndefined: return "projection-undefined";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::NotUnit: return "not-unit";
    case ErrorKind::RefineLoop: return "refine-loop";
    case ErrorKind::LiftFailed: return "lift-failed";
    case ErrorKind::InconsistentClass: return "inconsistent-class";
    case ErrorKind::Stagnation: return "stagnation";
    case ErrorKind::DomainError: return "domain-error";
    case ErrorKind::CannotClassify: return "cannot-classify";
    case ErrorKind::Io: return "io";
  }
  return "error";
}

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidParameter:
    case ErrorKind::Precondition:
    case ErrorKind::DomainError:
    case ErrorKind::Io:
    case ErrorKind::NotUnit:
      return kInvalid;
    default:
      return kFailed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landau-de Gennes defect experiments"};
  app.require_subcommand(1);
  Common common;

  auto* relax_cmd = app.add_subcommand("relax", "relax one problem and write a snapshot");
  add_common(relax_cmd, common);
  double relax_eps = 0;
  relax_cmd->add_option("--eps", relax_eps, "eps (default: first of the list)");

  auto* sweep_cmd = app.add_subcommand("sweep", "eps-sweep with diagnostics, CSV and snapshots");
  add_common(sweep_cmd, common);

  auto* classify_cmd = app.add_subcommand("classify-loop", "homotopy class of a loop file");
  add_common(classify_cmd, common);
  std::string loop_path;
  classify_cmd->add_option("loop", loop_path, "loop CSV")->required();

  auto* lb_cmd = app.add_subcommand("lower-bound", "slice lower bound on a planar snapshot");
  add_common(lb_cmd, common);
  std::string lb_snapshot, lb_center = "0,0";
  double lb_r = 0, lb_cfit = -1;
  lb_cmd->add_option("snapshot", lb_snapshot, "field snapshot")->required();
  lb_cmd->add_option("--r", lb_r, "circle radius")->required();
  lb_cmd->add_option("--center", lb_center, "circle center x,y");
  lb_cmd->add_option("--c-fit", lb_cfit, "calibration constant (default: frozen value or calibrate)");

  auto* bb_cmd = app.add_subcommand("ball-bound", "ball-construction lower bound");
  add_common(bb_cmd, common);
  std::string bb_balls, bb_snapshot;
  double bb_r = 1, bb_lambda = 19.0 / 40.0, bb_threshold = 0.5;
  bb_cmd->add_option("--balls", bb_balls, "JSON ball system {balls:[{center,radius,weight}],outer_weight}");
  bb_cmd->add_option("--snapshot", bb_snapshot, "planar snapshot: cover its defect mask");
  bb_cmd->add_option("--r", bb_r, "outer radius");
  bb_cmd->add_option("--lambda", bb_lambda, "lambda >= 19/40");
  bb_cmd->add_option("--threshold", bb_threshold, "phi0 mask threshold for --snapshot");

  auto* diag_cmd = app.add_subcommand("diagnose", "PDE-identity diagnostics of a snapshot");
  add_common(diag_cmd, common);
  std::string diag_snapshot;
  std::vector<std::string> diag_centers;
  std::vector<double> diag_poh;
  diag_cmd->add_option("snapshot", diag_snapshot, "field snapshot")->required();
  diag_cmd->add_option("--center", diag_centers, "monotonicity center x,y[,z] (repeatable)");
  diag_cmd->add_option("--pohozaev-radius", diag_poh, "Pohozaev ball radii around each center");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*relax_cmd) {
      const ExperimentConfig cfg = load_config(common);
      const double eps = relax_eps > 0 ? relax_eps : cfg.eps.front();
      int code = kOk;
      RelaxResult rr;
      try {
        rr = run_relax(cfg, eps);
      } catch (const StagnationError& e) {
        rr = e.partial();
        code = kFailed;
      }
      std::filesystem::create_directories(cfg.output_dir);
      write_snapshot((std::filesystem::path(cfg.output_dir) / "field.ldg").string(), rr.field);
      json j = {{"eps", eps},
                {"status", code == kOk ? to_string(rr.status) : "stagnated"},
                {"iterations", rr.iterations},
                {"residual", rr.residual},
                {"energy", to_json(assemble_energy(rr.field))}};
      emit(j, cfg.output_dir, "relax.json");
      return code;
    }
    if (*sweep_cmd) {
      const ExperimentConfig cfg = load_config(common);
      const SweepReport rep = run_sweep(cfg);
      std::cout << sweep_csv_header() << '\n';
      for (const SweepRow& r : rep.rows) std::cout << sweep_csv_row(r) << '\n';
      return rep.failed ? kFailed : kOk;
    }
    if (*classify_cmd) {
      const MaterialParams p = load_params(common);
      const NLoop loop = read_loop_csv(loop_path, p);
      json j = to_json(classify(loop, p));
      j["energy"] = loop_energy(loop);
      j["samples"] = loop.size();
      emit(j, common.out, "classify.json");
      return kOk;
    }
    if (*lb_cmd) {
      const Field f = read_snapshot(lb_snapshot);
      const SliceBound sb = slice_lower_bound(f, lb_r, parse_point(lb_center));
      double c_fit = lb_cfit;
      if (c_fit < 0) {
        const MaterialParams ref = derive_params(6, 1, 1, 1);
        const bool is_default = f.params.a2 == ref.a2 && f.params.a4 == ref.a4 && f.params.a6 == ref.a6 &&
                                f.params.a6p == ref.a6p;
        c_fit = is_default ? kDefaultCFit : calibrate_c_fit(f.params);
      }
      json j = to_json(sb);
      j["c_fit"] = c_fit;
      j["certified"] = sb.margin >= -c_fit;
      emit(j, common.out, "lower_bound.json");
      return sb.margin >= -c_fit ? kOk : kFailed;
    }
    if (*bb_cmd) {
      BallSystem sys;
      BallConstructionOptions opt;
      if (!bb_balls.empty()) {
        const json j = read_json(bb_balls);
        try {
          for (const auto& b : j.at("balls")) {
            const auto c = b.at("center").get<std::vector<double>>();
            if (c.size() < 2) throw Error(ErrorKind::InvalidParameter, "ball centers are x,y");
            sys.balls.push_back({{c[0], c[1], 0}, b.at("radius").get<double>(), b.value("weight", 0.0)});
          }
          sys.outer_weight = j.value("outer_weight", -1.0);
        } catch (const json::exception& e) {
          throw Error(ErrorKind::InvalidParameter, std::string("ball system: ") + e.what());
        }
      } else if (!bb_snapshot.empty()) {
        const Field f = read_snapshot(bb_snapshot);
        const MaterialParams& p = f.params;
        const DefectMask m = defect_mask(f, bb_threshold);
        std::vector<Vec3> pts;
        for (std::size_t idx = 0; idx < f.domain.node_count(); ++idx)
          if (m.flagged[idx] && norm(f.domain.position(idx)) < bb_r) pts.push_back(f.domain.position(idx));
        const SetCover cover = cover_set(pts, f.domain.h);
        auto weight = [&](Vec3 c, double r) {
          const std::size_t n = std::max<std::size_t>(256, static_cast<std::size_t>(64 * r / f.domain.h));
          try {
            return e_star(classify(make_loop(circle_trace(f, c, r * 1.05 + f.domain.h, n), p), p).tag, p);
          } catch (const Error&) {
            return 0.0;
          }
        };
        for (const Ball& b : cover.balls) sys.balls.push_back({b.center, b.radius, weight(b.center, b.radius)});
        const std::size_t n = std::max<std::size_t>(512, static_cast<std::size_t>(64 * bb_r / f.domain.h));
        sys.outer_weight = e_star(classify(make_loop(circle_trace(f, {}, bb_r, n), p), p).tag, p);
        opt.weight = weight;
      } else {
        throw Error(ErrorKind::InvalidParameter, "ball-bound needs --balls or --snapshot");
      }
      const BallConstruction bc = ball_construction(sys, bb_lambda, bb_r, opt);
      emit(to_json(bc), common.out, "ball_bound.json");
      return bc.invariant_violations == 0 && bc.bound >= bc.certified - 1e-9 ? kOk : kFailed;
    }
    if (*diag_cmd) {
      const Field f = read_snapshot(diag_snapshot);
      DiagnosticsOptions opt;
      for (const std::string& s : diag_centers) opt.centers.push_back(parse_point(s));
      if (opt.centers.empty()) opt.centers.push_back({});
      for (const Vec3& c : opt.centers)
        for (double r : diag_poh) opt.pohozaev_balls.push_back({c, r});
      json j = to_json(diagnostics(f, opt));
      j["energy"] = to_json(assemble_energy(f));
      emit(j, common.out, "diagnostics.json");
      return kOk;
    }
  } catch (const Error& e) {
    json err = {{"error", kind_name(e.kind())}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return kFailed;
  }
  return kInvalid;
}
