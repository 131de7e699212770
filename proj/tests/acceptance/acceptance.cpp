// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hcdpr/dynamics.hpp"
#include "hcdpr/kinematics.hpp"
#include "hcdpr/params.hpp"
#include "hcdpr/report.hpp"
#include "hcdpr/sim.hpp"
#include "hcdpr/tension.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace hcdpr;
using testing_support::rel_error;
using testing_support::Sampler;

namespace {

const RobotParams P = default_params();
constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Verdict check(bool ok, const std::string& detail) { return {ok, detail}; }

Verdict combine(std::initializer_list<Verdict> parts) {
  Verdict v;
  for (const auto& p : parts) {
    v.pass = v.pass && p.pass;
    v.detail += (v.detail.empty() ? "" : "; ") + p.detail;
  }
  return v;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Scenario results shared by criteria 9-12.
struct Run {
  ScenarioSpec spec;
  SimResult result;
  double seconds = 0;
};

std::map<std::string, Run>& runs() {
  static std::map<std::string, Run> cache;
  return cache;
}

const Run& run(const std::string& name) {
  auto& cache = runs();
  if (auto it = cache.find(name); it != cache.end()) return it->second;
  Run r;
  r.spec = builtin_scenarios().at(name);
  const auto t0 = std::chrono::steady_clock::now();
  r.result = run_scenario(r.spec, P);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cache.emplace(name, std::move(r)).first->second;
}

std::string csv_of(const Run& r) {
  std::ostringstream out;
  write_csv(out, r.result.records, r.spec.strategy == Strategy::kA ? 4 : 5);
  return out.str();
}

// 1. Table 1 fidelity, literal values from the table.
Verdict table_fidelity() {
  const RobotParams p = default_params();
  const std::vector<std::pair<double, double>> pairs = {
      {p.l_a, 0.440},   {p.l_bd, 0.055}, {p.l_b, 0.268},   {p.l_g, 0.086},  {p.l_c, 0.105},
      {p.l_h, 0.105},   {p.l_d, 0.412},  {p.l_m, 0.052},   {p.l_e, 3.000},  {p.l_1, 0.305},
      {p.l_f, 1.000},   {p.l_2, 0.305},  {p.l_c1, 0.1525}, {p.l_c2, 0.1525}, {p.m_m, 30},
      {p.I_m, 0.83},    {p.m_1, 10},     {p.I_1, 0.18},    {p.m_2, 10},     {p.I_2, 0.18},
      {p.T_min, 40},    {p.T_max, 2000}, {p.K_s, 1.1e4},   {p.g, 9.810}};
  int mismatches = 0;
  for (const auto& [have, want] : pairs) mismatches += have != want;
  return check(mismatches == 0, std::to_string(pairs.size()) + " values, " +
                                    std::to_string(mismatches) + " mismatches");
}

// 2. IK(FK(q)) over 1000 in-workspace states.
Verdict kinematics_roundtrip() {
  Sampler s(1002);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    Vector5d q;
    double t2 = 0;
    do t2 = s.uniform(-kPi, kPi);
    while (std::abs(t2) < 0.05);
    q << s.uniform(-0.5, 0.5), s.uniform(-0.3, 0.3), 0.0, s.uniform(-kPi / 2, kPi / 2), t2;
    const auto geo = cable_geometry<double>(q, P);
    const auto pose = forward_kinematics<double>(q, P).pose;
    Vector5d back;
    back.head<3>() = inverse_platform(geo.lengths[0], geo.lengths[5], P);
    back.tail<2>() = inverse_arm(pose.x_e, pose.z_e, Vector3d(back.head<3>()), P,
                                 t2 > 0 ? ElbowBranch::kPlus : ElbowBranch::kMinus);
    worst = std::max(worst, (back - q).cwiseAbs().maxCoeff());
  }
  return check(worst < 1e-9, "max |dq| = " + fmt("%.3g", worst) + " (limit 1e-9)");
}

// 3. Analytic Jacobian against central differences of the transform chain.
Verdict jacobian_check() {
  Sampler s(1003);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const Vector5d q = s.configuration(1.0);
    Matrix3x5d fd;
    const double h = 1e-6;
    for (int j = 0; j < 5; ++j) {
      const auto a = oracle::arm_chain<double>(q + h * Vector5d::Unit(j), P);
      const auto b = oracle::arm_chain<double>(q - h * Vector5d::Unit(j), P);
      fd.col(j) << (a.pe - b.pe) / (2 * h), (a.q_e - b.q_e) / (2 * h);
    }
    worst = std::max(worst, rel_error(jacobian<double>(q, P), fd));
  }
  return check(worst < 1e-6, "max rel error " + fmt("%.3g", worst) + " (limit 1e-6)");
}

// 4. M, C, G against the energy-based Euler-Lagrange oracle.
Verdict dynamics_terms() {
  Sampler s(1004);
  double wM = 0, wC = 0, wG = 0, asym = 0, min_eig = 1e300;
  for (int k = 0; k < 50; ++k) {
    const Vector5d q = s.configuration(1.0), v = s.velocity();
    GeneralizedStated st;
    st.q = q;
    st.qdot = v;
    const auto d = dynamic_terms(st, P);
    wM = std::max(wM, rel_error(d.M, oracle::inertia(q, P)));
    wC = std::max(wC, rel_error(Vector5d(d.C * v), oracle::coriolis_force(q, v, P)));
    wG = std::max(wG, rel_error(d.G, oracle::gravity(q, P)));
    asym = std::max(asym, (d.M - d.M.transpose()).cwiseAbs().maxCoeff() / d.M.cwiseAbs().maxCoeff());
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Matrix5d>(d.M).eigenvalues().minCoeff());
  }
  const double tol = 1e-5;
  return combine({check(wM < tol, "M rel " + fmt("%.2g", wM)),
                  check(wC < tol, "C*qdot rel " + fmt("%.2g", wC)),
                  check(wG < tol, "G rel " + fmt("%.2g", wG)),
                  check(asym < 1e-10, "asymmetry " + fmt("%.2g", asym)),
                  check(min_eig > 0, "min eig(M) " + fmt("%.3g", min_eig))});
}

// 5. Cable generalized force equals the Newton-Euler resultant.
Verdict newton_euler() {
  Sampler s(1005);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const Vector5d q = s.configuration(0.5);
    Vector6d T;
    for (int i = 0; i < 6; ++i) T[i] = s.uniform(0, 2000);
    const Vector3d a = cable_geometry<double>(q, P).structure_matrix * T;
    worst = std::max(worst, (a - oracle::cable_wrench(q[0], q[1], q[2], T, P)).cwiseAbs().maxCoeff());
  }
  return check(worst < 1e-10, "max abs error " + fmt("%.3g", worst) + " (limit 1e-10)");
}

// 6. Energy conservation of the unforced spring-cable model, and RK4 order.
ControlCommand held_cables() {
  const Vector5d q = Vector5d::Zero();
  const auto geo = cable_geometry<double>(q, P);
  const auto sol = optimize_tensions(geo, static_wrench(q, P), P, geo.lengths);
  ControlCommand c;
  c.tension_inputs = {P.K_s * geo.lengths[0] / (P.K_s + sol.T[0]), sol.T[2], sol.T[3],
                      P.K_s * geo.lengths[5] / (P.K_s + sol.T[5])};
  return c;
}

double total_energy(const GeneralizedStated& s, const ControlCommand& c) {
  const auto geo = cable_geometry<double>(s.q, P);
  const auto t = cable_tensions(geo, c.tension_inputs, P, SlackModel::kBilateral);
  return energy(s, P).total() + cable_potential(geo, t, P, SlackModel::kBilateral);
}

GeneralizedStated roll(GeneralizedStated s, const ControlCommand& c, double dt, double span) {
  const long n = std::lround(span / dt);
  for (long k = 0; k < n; ++k) s = integrate_step(s, c, P, dt, SlackModel::kBilateral);
  return s;
}

Verdict energy_and_order() {
  const ControlCommand c = held_cables();
  GeneralizedStated s0;
  s0.q << 0.01, -0.02, 0.01, 0.3, -0.2;
  s0.qdot << 0.05, 0.02, -0.05, 0.5, -0.5;

  const double E0 = total_energy(s0, c);
  GeneralizedStated s = s0;
  double drift = 0, ke_peak = 0;
  for (int k = 0; k < 10000; ++k) {
    s = integrate_step(s, c, P, 1e-4, SlackModel::kBilateral);
    drift = std::max(drift, std::abs(total_energy(s, c) - E0));
    ke_peak = std::max(ke_peak, energy(s, P).kinetic);
  }
  const double rel = drift / std::abs(E0);
  // E0 depends on the potential datum, so also bound drift by the energy
  // that actually moves between kinetic and potential form.
  const double rel_ke = drift / ke_peak;

  const GeneralizedStated ref = roll(s0, c, 1e-6, 0.5);
  double err[3];
  const double dts[3] = {4e-4, 2e-4, 1e-4};
  for (int i = 0; i < 3; ++i) err[i] = (roll(s0, c, dts[i], 0.5).q - ref.q).cwiseAbs().maxCoeff();
  const double order = std::min(std::log2(err[0] / err[1]), std::log2(err[1] / err[2]));
  return combine({check(rel < 1e-5, "|dE|/E0 " + fmt("%.2g", rel)),
                  check(rel_ke < 1e-5, "|dE|/max KE " + fmt("%.2g", rel_ke)),
                  check(order >= 3.7, "RK4 order " + fmt("%.3f", order) + " (min 3.7)")});
}

// 7. Stiffness against finite differences of the spring-cable wrench.
Verdict stiffness_oracle() {
  Sampler s(1007);
  const Matrix3d S = Vector3d(1, 1, -1).asDiagonal();  // theta turns about -Y
  constexpr int axes[3] = {0, 2, 4};
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const Vector5d q = s.configuration(0.1);
    const auto geo = cable_geometry<double>(q, P);
    const auto sol = optimize_tensions(geo, static_wrench(q, P), P, geo.lengths);
    const Vector6d L0 = rest_lengths(geo.lengths, sol.T, P);
    const Matrix6d K = stiffness_matrices(geo, sol.T, P, L0).K;
    Matrix3d planar, fd;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) planar(a, b) = K(axes[a], axes[b]);
    }
    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
      const Vector3d d = h * Vector3d::Unit(j);
      fd.col(j) = -(oracle::spring_cable_wrench(q[0] + d[0], q[1] + d[1], q[2] + d[2], L0, sol.T[2], sol.T[3], P) -
                    oracle::spring_cable_wrench(q[0] - d[0], q[1] - d[1], q[2] - d[2], L0, sol.T[2], sol.T[3], P)) /
                  (2 * h);
    }
    worst = std::max(worst, (S * planar * S - fd).norm() / fd.norm());
  }
  return check(worst < 1e-4, "max rel error " + fmt("%.3g", worst) + " (limit 1e-4)");
}

// 8. lambda3 program against a grid scan; closed forms against substitution.
Verdict lambda_program() {
  Sampler s(1008);
  double worst_scan = 0, worst_gap = 0, worst_form = 0;
  bool bounded = true;
  auto score = [&](const LambdaReduction& r) {
    const auto sol = maximize_lambda3(r, P);
    const auto scan = oracle::grid_scan_max(r.D_A, r.E_A, P.T_min, P.T_max, 1e4, 1e-5);
    worst_scan = std::max(worst_scan, scan ? std::abs(sol.lambda3 - *scan) : 1e300);
    const double gap = ((sol.T.array() - P.T_min).abs().min((sol.T.array() - P.T_max).abs())).minCoeff();
    worst_gap = std::max(worst_gap, gap);
    bounded = bounded && sol.T.minCoeff() >= P.T_min && sol.T.maxCoeff() <= P.T_max;
  };
  for (int k = 0; k < 100; ++k) {
    LambdaReduction r;
    Vector6d inside;
    for (int i = 0; i < 6; ++i) {
      r.D_A[i] = s.uniform(0.3, 3.0) * (s.uniform(0, 1) < 0.5 ? -1 : 1);
      inside[i] = s.uniform(100, 1900);
    }
    r.E_A = inside - s.uniform(-300, 300) * r.D_A;
    score(r);
  }
  for (int k = 0; k < 20; ++k) {
    const Vector5d q = s.configuration(0.0);
    const auto geo = cable_geometry<double>(q, P);
    const auto sol = optimize_tensions(geo, static_wrench(q, P), P, geo.lengths);
    score(sol.reduction);
    Vector6d D, E;
    closed_form_reduction(sol.T_A, sol.N_A, geo, P, geo.lengths, D, E);
    worst_form = std::max({worst_form, rel_error(D, sol.reduction.D_A), rel_error(E, sol.reduction.E_A)});
  }
  return combine({check(worst_scan <= 1e-3, "max |lambda3 - scan| " + fmt("%.2g", worst_scan)),
                  check(worst_gap < 1e-6, "max distance to a bound " + fmt("%.2g", worst_gap)),
                  check(bounded, bounded ? "all T in [40, 2000]" : "T outside [40, 2000]"),
                  check(worst_form < 1e-9, "closed form rel " + fmt("%.2g", worst_form))});
}

// 9. Case 2 step response.
Verdict case2() {
  const Run& r = run("case2");
  if (r.result.divergence) return check(false, "diverged: " + r.result.divergence->message);
  const Eigen::VectorXd step = r.spec.trajectory.sample(0.0);
  Eigen::VectorXd band(5);
  // Channels with no step are held to a fixed 0.2 mm / 0.2 mrad band.
  for (int j = 0; j < 5; ++j) band[j] = step[j] != 0 ? 0.05 * std::abs(step[j]) : 2e-4;
  const double settle = settling_time(r.result.records, band);
  const ScenarioSummary sum = summarize(r.result, r.spec);
  return combine({check(settle <= 0.5, "settled at " + fmt("%.4f", settle) + " s (limit 0.5)"),
                  check(!sum.sustained, "oscillation ratio " + fmt("%.2g", sum.oscillation_ratio)),
                  check(r.seconds < 10, "runtime " + fmt("%.2f", r.seconds) + " s")});
}

// 10. Cases 4a and 4b.
Verdict case4() {
  std::vector<Verdict> parts;
  double seconds = 0;
  for (const char* name : {"case4a", "case4b"}) {
    const Run& r = run(name);
    seconds += r.seconds;
    if (r.result.divergence) return check(false, std::string(name) + " diverged");
    const double settle = summarize(r.result, r.spec).settling_time;
    double lowest = 1e300;
    for (const auto& rec : r.result.records) lowest = std::min({lowest, rec.T[2], rec.T[3]});
    parts.push_back(check(settle <= 0.5, std::string(name) + " settled at " + fmt("%.4f", settle) + " s"));
    parts.push_back(check(lowest > 0, std::string(name) + " min T3/T4 " + fmt("%.1f", lowest) + " N"));
  }
  parts.push_back(check(seconds < 20, "runtime " + fmt("%.2f", seconds) + " s"));
  Verdict v;
  for (const auto& p : parts) v = combine({v, p});
  return v;
}

// 11. Strategy A runs keep oscillating in both cable channels.
Verdict strategy_a() {
  std::vector<Verdict> parts;
  double seconds = 0;
  for (const char* name : {"case1", "case3a", "case3b"}) {
    const Run& r = run(name);
    seconds += r.seconds;
    if (r.result.divergence) return check(false, std::string(name) + " diverged");
    const Eigen::VectorXd ratio = oscillation_ratios(r.result.records);
    const double low = std::min(ratio[0], ratio[1]);
    parts.push_back(check(low >= kSustainedOscillationRatio,
                          std::string(name) + " L1/L6 ratio " + fmt("%.2f", ratio[0]) + "/" + fmt("%.2f", ratio[1])));
  }
  parts.push_back(check(seconds < 15, "runtime " + fmt("%.2f", seconds) + " s"));
  Verdict v;
  for (const auto& p : parts) v = combine({v, p});
  return v;
}

// 12. Re-running reproduces the CSV byte for byte.
Verdict determinism() {
  std::vector<Verdict> parts;
  for (const char* name : {"case1", "case2"}) {
    const Run& first = run(name);
    Run again;
    again.spec = first.spec;
    again.result = run_scenario(again.spec, P);
    const auto a = fnv1a(csv_of(first)), b = fnv1a(csv_of(again));
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(a));
    parts.push_back(check(a == b, std::string(name) + (a == b ? " hash " : " hash mismatch ") + hex));
  }
  Verdict v;
  for (const auto& p : parts) v = combine({v, p});
  return v;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // wall-clock budget, 0 for none
  std::function<Verdict()> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Table 1 fidelity", 1, table_fidelity},
      {2, "kinematics roundtrip", 1, kinematics_roundtrip},
      {3, "Jacobian check", 1, jacobian_check},
      {4, "dynamic terms vs Euler-Lagrange", 5, dynamics_terms},
      {5, "cable force vs Newton-Euler", 1, newton_euler},
      {6, "energy conservation and RK4 order", 5, energy_and_order},
      {7, "stiffness oracle", 2, stiffness_oracle},
      {8, "lambda3 program", 5, lambda_program},
      {9, "case 2 step response", 0, case2},
      {10, "cases 4a/4b tracking", 0, case4},
      {11, "strategy A sustained oscillation", 0, strategy_a},
      {12, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && s >= c.limit_s) {
      v.pass = false;
      v.detail += "; over the " + fmt("%.0f", c.limit_s) + " s budget";
    }
    failed += !v.pass;
    std::printf("[%s] %2d %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
