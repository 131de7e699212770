#include "hcdpr/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hcdpr/errors.hpp"
#include "hcdpr/kinematics.hpp"
#include "hcdpr/params.hpp"
#include "hcdpr/report.hpp"
#include "hcdpr/sim.hpp"
#include "hcdpr/tension.hpp"

namespace hcdpr {
namespace {

namespace fs = std::filesystem;

struct RunOptions {
  std::string target;
  std::string config;
  std::string out_dir = ".";
  std::optional<double> dt;
  std::optional<double> duration;
};

struct PoseOptions {
  double x_m = 0, z_m = 0, theta_m = 0, theta_1 = 0, theta_2 = 0;
  bool json = false;
  std::string config;
};

struct IkOptions {
  double x_e = 0, z_e = 0;
  double x_m = 0, z_m = 0, theta_m = 0;
  std::optional<double> L1, L6;
  std::string config;
};

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string row_text(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

ConfigDocument load_document(const std::string& path) {
  if (path.empty()) return ConfigDocument{default_params(), EquivalentSprings{}, nlohmann::json::object()};
  return load_config_document(path);
}

int run_one(const ScenarioSpec& spec, const RobotParams& p, const RunOptions& opt,
            std::ostream& out, std::ostream& err) {
  const SimResult result = run_scenario(spec, p);
  const int channels = spec.strategy == Strategy::kA ? 4 : 5;

  fs::create_directories(opt.out_dir);
  const fs::path csv_path = fs::path(opt.out_dir) / (spec.name + "_timeseries.csv");
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw ConfigError("cannot write " + csv_path.string());
    write_csv(csv, result.records, channels);
  }
  RunManifest manifest;
  manifest.scenario = spec.name;
  manifest.config_path = opt.config;
  manifest.output_dir = opt.out_dir;
  manifest.dt_override = opt.dt;
  manifest.duration_override = opt.duration;
  manifest.tool_version = kToolVersion;
  {
    std::ofstream mf(fs::path(opt.out_dir) / (spec.name + "_manifest.json"));
    nlohmann::json doc = to_json(manifest, spec);
    if (result.divergence) {
      doc["divergence"] = {{"t", result.divergence->t},
                           {"channel", result.divergence->channel},
                           {"message", result.divergence->message}};
    }
    mf << doc.dump(2) << '\n';
  }

  for (const auto& line : result.log) err << spec.name << ": " << line << '\n';
  if (!result.records.empty()) out << summary_line(spec.name, summarize(result, spec)) << '\n';
  if (result.divergence) {
    err << spec.name << ": diverged at t=" << format_double(result.divergence->t) << ": "
        << result.divergence->message << '\n';
    return kExitDivergence;
  }
  return kExitOk;
}

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  const ConfigDocument config = load_document(opt.config);
  const auto builtins = builtin_scenarios();

  std::vector<ScenarioSpec> specs;
  if (opt.target == "all") {
    for (const auto& [name, spec] : builtins) specs.push_back(spec);
  } else if (auto it = builtins.find(opt.target); it != builtins.end()) {
    specs.push_back(it->second);
  } else if (fs::is_regular_file(opt.target)) {
    const ConfigDocument doc = load_config_document(opt.target);
    if (doc.scenario.empty()) throw ConfigError(opt.target + " has no 'scenario' object");
    specs.push_back(scenario_from_json(doc.scenario));
  } else {
    err << "unknown scenario '" << opt.target << "'; choose one of:";
    for (const auto& [name, spec] : builtins) err << ' ' << name;
    err << ", all, or a scenario file\n";
    return kExitUsage;
  }
  // A scenario object inside --config overrides the selected builtin.
  if (!config.scenario.empty() && specs.size() == 1 && opt.target != "all") {
    nlohmann::json merged = to_json(specs.front());
    merged.update(config.scenario);
    merged.erase("base");
    specs.front() = scenario_from_json(merged);
  }

  int code = kExitOk;
  for (auto spec : specs) {
    if (opt.dt) spec.dt = *opt.dt;
    if (opt.duration) spec.duration = *opt.duration;
    validate(spec);
    code = std::max(code, run_one(spec, config.params, opt, out, err));
  }
  return code;
}

int cmd_tension_query(const PoseOptions& opt, std::ostream& out, std::ostream& err) {
  const RobotParams p = load_document(opt.config).params;
  Vector5d q;
  q << opt.x_m, opt.z_m, opt.theta_m, opt.theta_1, opt.theta_2;
  const auto geo = cable_geometry<double>(q, p);
  const Vector3d W = static_wrench(q, p);
  RedundancySolution sol;
  try {
    sol = optimize_tensions(geo, W, p, geo.lengths);
  } catch (const InfeasibleTensionError& e) {
    err << e.what() << "\nper-cable feasible lambda3 intervals:\n";
    for (std::size_t i = 0; i < e.intervals().size(); ++i) {
      err << "  cable " << i + 1 << ": [" << format_double(e.intervals()[i].lower) << ", "
          << format_double(e.intervals()[i].upper) << "]\n";
    }
    return kExitWorkspace;
  }
  const Matrix6d K = stiffness_matrices(geo, sol.T, p, rest_lengths(geo.lengths, sol.T, p)).K;

  if (opt.json) {
    nlohmann::json doc;
    doc["A"] = matrix_json(geo.structure_matrix);
    doc["W_m"] = vector_json(W);
    doc["lambda3"] = sol.lambda[2];
    doc["T"] = vector_json(sol.T);
    doc["K"] = matrix_json(K);
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  out << "A:\n";
  for (int i = 0; i < 3; ++i) out << "  " << row_text(geo.structure_matrix.row(i).transpose()) << '\n';
  out << "W_m: " << row_text(W) << '\n';
  out << "lambda3: " << format_double(sol.lambda[2]) << '\n';
  out << "T: " << row_text(sol.T) << '\n';
  out << "K:\n";
  for (int i = 0; i < 6; ++i) out << "  " << row_text(K.row(i).transpose()) << '\n';
  return kExitOk;
}

int cmd_fk(const std::vector<double>& qv, const std::string& config, std::ostream& out) {
  if (qv.size() != 5) throw CLI::ValidationError("--q", "needs exactly 5 comma-separated values");
  const RobotParams p = load_document(config).params;
  const Vector5d q = Eigen::Map<const Vector5d>(qv.data());
  const auto pose = forward_kinematics<double>(q, p).pose;
  const auto geo = cable_geometry<double>(q, p);
  out << "x_e=" << format_double(pose.x_e) << " z_e=" << format_double(pose.z_e)
      << " q_e=" << format_double(pose.q_e) << '\n';
  out << "L: " << row_text(geo.lengths) << '\n';
  return kExitOk;
}

int cmd_ik(const IkOptions& opt, std::ostream& out, std::ostream& err) {
  const RobotParams p = load_document(opt.config).params;
  Vector3d platform(opt.x_m, opt.z_m, opt.theta_m);
  if (opt.L1 || opt.L6) {
    if (!(opt.L1 && opt.L6)) throw CLI::ValidationError("--L1/--L6", "give both or neither");
    platform = inverse_platform<double>(*opt.L1, *opt.L6, p);
    out << "platform: x_m=" << format_double(platform[0]) << " z_m=" << format_double(platform[1])
        << " theta_m=" << format_double(platform[2]) << '\n';
  }
  int solved = 0;
  for (const auto& [label, branch] : {std::pair{"plus", ElbowBranch::kPlus},
                                      std::pair{"minus", ElbowBranch::kMinus}}) {
    try {
      const Vector2d th = inverse_arm<double>(opt.x_e, opt.z_e, platform, p, branch);
      out << label << ": theta_1=" << format_double(th[0]) << " theta_2=" << format_double(th[1])
          << '\n';
      ++solved;
    } catch (const Error& e) {
      err << label << ": " << e.what() << '\n';
    }
  }
  return solved ? kExitOk : kExitWorkspace;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Planar hybrid cable-driven parallel robot simulator", "hcdpr"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run a builtin case, 'all', or a scenario file");
  run->add_option("scenario", run_opt.target, "case1 case2 case3a case3b case4a case4b, all, or a path")
      ->required();
  run->add_option("--config", run_opt.config, "JSON config with robot parameters");
  run->add_option("--out", run_opt.out_dir, "Output directory");
  run->add_option("--dt", run_opt.dt, "Integration step override (s)");
  run->add_option("--duration", run_opt.duration, "Run length override (s)");

  PoseOptions pose_opt;
  auto* tq = app.add_subcommand("tension-query", "Optimal tensions and stiffness at a pose");
  tq->add_option("--x_m", pose_opt.x_m);
  tq->add_option("--z_m", pose_opt.z_m);
  tq->add_option("--theta_m", pose_opt.theta_m);
  tq->add_option("--theta_1", pose_opt.theta_1);
  tq->add_option("--theta_2", pose_opt.theta_2);
  tq->add_flag("--json", pose_opt.json, "Machine-readable output");
  tq->add_option("--config", pose_opt.config);

  std::vector<double> fk_q;
  std::string fk_config;
  auto* fk = app.add_subcommand("fk", "Forward kinematics");
  fk->add_option("--q", fk_q, "x_m,z_m,theta_m,theta_1,theta_2")->delimiter(',')->required();
  fk->add_option("--config", fk_config);

  IkOptions ik_opt;
  auto* ik = app.add_subcommand("ik", "Arm inverse kinematics, both elbow branches");
  ik->add_option("--x_e", ik_opt.x_e)->required();
  ik->add_option("--z_e", ik_opt.z_e)->required();
  ik->add_option("--x_m", ik_opt.x_m);
  ik->add_option("--z_m", ik_opt.z_m);
  ik->add_option("--theta_m", ik_opt.theta_m);
  ik->add_option("--L1", ik_opt.L1, "Solve the platform from cable lengths");
  ik->add_option("--L6", ik_opt.L6);
  ik->add_option("--config", ik_opt.config);

  try {
    app.parse(argc, argv);
    if (*run) return cmd_run(run_opt, out, err);
    if (*tq) return cmd_tension_query(pose_opt, out, err);
    if (*fk) return cmd_fk(fk_q, fk_config, out);
    return cmd_ik(ik_opt, out, err);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << e.what() << '\n';
    return kExitDivergence;
  } catch (const WorkspaceError& e) {
    err << e.what() << '\n';
    return kExitWorkspace;
  } catch (const SingularConfigurationError& e) {
    err << e.what() << '\n';
    return kExitWorkspace;
  } catch (const InfeasibleTensionError& e) {
    err << e.what() << '\n';
    return kExitWorkspace;
  } catch (const ConstraintDegeneracyError& e) {
    err << e.what() << '\n';
    return kExitWorkspace;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace hcdpr
