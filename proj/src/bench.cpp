#include "phaseconv/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "phaseconv/instance_io.hpp"

namespace phaseconv::bench {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string_view shape_name(NoiseShape s) { return s == NoiseShape::Constant ? "constant" : "uniform_sign"; }

NoiseShape shape_from_name(const std::string& s) {
  if (s == "uniform_sign") return NoiseShape::UniformSign;
  if (s == "constant") return NoiseShape::Constant;
  throw ParseError("noise_shape", "unknown noise shape '" + s + "'");
}

// Runs `count` jobs on `threads` workers; job i writes only slot i.
template <class Job>
void parallel_for(std::size_t count, int threads, Job&& job) {
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
}

json outcome_to_json(const TrialOutcome& o, bool deterministic) {
  return {{"seed", o.seed},
          {"noise_inf", o.noise_inf},
          {"converged", o.converged},
          {"success", o.success},
          {"h_error", o.h_error},
          {"m_error", o.m_error},
          {"signal_error", o.signal_error},
          {"lifted_error", o.lifted_error},
          {"objective", o.objective},
          {"trace_opt", o.trace_opt},
          {"iterations", o.iterations},
          {"wall_ms", deterministic ? 0.0 : o.wall_ms}};
}

void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error("output directory is not writable: " + dir.string());
  const auto probe = dir / ".phaseconv_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw std::runtime_error("output directory is not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string heatmap_csv(const std::vector<CellResult>& cells) {
  std::vector<int> ms, totals;
  std::map<std::pair<int, int>, double> rate;
  for (const auto& c : cells) {
    ms.push_back(c.m);
    totals.push_back(c.k + c.n);
    rate[{c.m, c.k + c.n}] = c.success_rate();
  }
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  std::sort(totals.begin(), totals.end());
  totals.erase(std::unique(totals.begin(), totals.end()), totals.end());
  std::ostringstream os;
  os << "m\\k+n";
  for (int t : totals) os << ',' << t;
  os << '\n';
  for (int m : ms) {
    os << m;
    for (int t : totals) {
      os << ',';
      if (auto it = rate.find({m, t}); it != rate.end()) os << fmt(it->second);
    }
    os << '\n';
  }
  return os.str();
}

std::string heatmap_svg(const std::vector<CellResult>& cells) {
  std::vector<int> ms, totals;
  for (const auto& c : cells) {
    ms.push_back(c.m);
    totals.push_back(c.k + c.n);
  }
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  std::sort(totals.begin(), totals.end());
  totals.erase(std::unique(totals.begin(), totals.end()), totals.end());
  const int cell = 32, left = 60, top = 20;
  const int width = left + cell * static_cast<int>(totals.size()) + 20;
  const int height = top + cell * static_cast<int>(ms.size()) + 40;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  for (const auto& c : cells) {
    const auto col = std::find(totals.begin(), totals.end(), c.k + c.n) - totals.begin();
    // Larger m at the top, as in a phase portrait.
    const auto row = static_cast<long>(ms.size()) - 1 - (std::find(ms.begin(), ms.end(), c.m) - ms.begin());
    const int level = static_cast<int>(std::lround(255.0 * (1.0 - c.success_rate())));
    os << "<rect x=\"" << left + col * cell << "\" y=\"" << top + row * cell << "\" width=\"" << cell
       << "\" height=\"" << cell << "\" fill=\"rgb(" << level << ',' << level << ',' << level << ")\"/>\n";
  }
  for (std::size_t i = 0; i < ms.size(); ++i)
    os << "<text x=\"4\" y=\"" << top + (ms.size() - 1 - i) * cell + cell / 2 + 4 << "\" font-size=\"11\">"
       << ms[i] << "</text>\n";
  for (std::size_t j = 0; j < totals.size(); ++j)
    os << "<text x=\"" << left + j * cell + 4 << "\" y=\"" << top + ms.size() * cell + 14
       << "\" font-size=\"11\">" << totals[j] << "</text>\n";
  os << "<text x=\"" << left << "\" y=\"" << height - 6 << "\" font-size=\"12\">k+n</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw ParseError("trials", "must be >= 1");
  if (m_values.empty()) throw ParseError("m_values", "must not be empty");
  if (kn_pairs.empty()) throw ParseError("kn_pairs", "must not be empty");
  for (int m : m_values)
    if (m < 1) throw ParseError("m_values", "dimensions must be positive");
  for (const auto& [k, n] : kn_pairs)
    if (k < 1 || n < 1) throw ParseError("kn_pairs", "dimensions must be positive");
  for (double eps : noise_levels) {
    if (!(eps >= 0.0)) throw ParseError("noise_levels", "levels must be >= 0");
    if (noise_shape == NoiseShape::UniformSign && eps > 1.0)
      throw ParseError("noise_levels", "levels above 1 would allow xi < -1");
  }
  if (threads < 1) throw ParseError("threads", "must be >= 1");
  try {
    solver.validate();
  } catch (const DomainError& e) {
    throw ParseError("solver", e.what());
  }
}

ExperimentConfig ExperimentConfig::desk() {
  ExperimentConfig cfg;
  cfg.m_values = {32, 64, 128, 256};
  for (int total = 4; total <= 64; total += 4) cfg.kn_pairs.emplace_back(total / 2, total / 2);
  cfg.trials = 20;
  cfg.noise_levels = {0.0, 0.01, 0.05, 0.1};
  return cfg;
}

ExperimentConfig ExperimentConfig::full() {
  ExperimentConfig cfg;
  cfg.m_values = {32, 64, 96, 128, 192, 256, 384, 512};
  for (int total = 4; total <= 128; total += 4) cfg.kn_pairs.emplace_back(total / 2, total / 2);
  cfg.trials = 100;
  cfg.noise_levels = {0.0, 0.01, 0.02, 0.05, 0.1, 0.2};
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json pairs = json::array();
  for (const auto& [k, n] : cfg.kn_pairs) pairs.push_back({k, n});
  return {{"m_values", cfg.m_values},
          {"kn_pairs", pairs},
          {"trials", cfg.trials},
          {"noise_levels", cfg.noise_levels},
          {"noise_shape", std::string(shape_name(cfg.noise_shape))},
          {"subspace_mode", std::string(to_string(cfg.subspace_mode))},
          {"base_seed", cfg.base_seed},
          {"solver", io::config_to_json(cfg.solver)},
          {"threads", cfg.threads},
          {"deterministic", cfg.deterministic},
          {"write_svg", cfg.write_svg}};
}

ExperimentConfig config_from_json(const json& doc, ExperimentConfig cfg) {
  if (!doc.is_object()) throw ParseError("config", "expected a JSON object");
  auto get = [&](const char* key, auto& field) {
    if (!doc.contains(key)) return;
    try {
      field = doc[key].get<std::decay_t<decltype(field)>>();
    } catch (const json::exception& e) {
      throw ParseError(key, e.what());
    }
  };
  get("m_values", cfg.m_values);
  if (doc.contains("kn_pairs")) {
    cfg.kn_pairs.clear();
    const json& pairs = doc["kn_pairs"];
    if (!pairs.is_array()) throw ParseError("kn_pairs", "expected an array of [k, n] pairs");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const json& p = pairs[i];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
        throw ParseError("kn_pairs[" + std::to_string(i) + "]", "expected [k, n]");
      cfg.kn_pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
    }
  }
  get("trials", cfg.trials);
  get("noise_levels", cfg.noise_levels);
  if (doc.contains("noise_shape")) {
    if (!doc["noise_shape"].is_string()) throw ParseError("noise_shape", "expected a string");
    cfg.noise_shape = shape_from_name(doc["noise_shape"].get<std::string>());
  }
  if (doc.contains("subspace_mode")) {
    if (!doc["subspace_mode"].is_string()) throw ParseError("subspace_mode", "expected a string");
    cfg.subspace_mode = subspace_mode_from_string(doc["subspace_mode"].get<std::string>());
  }
  get("base_seed", cfg.base_seed);
  if (doc.contains("solver")) cfg.solver = io::config_from_json(doc["solver"], cfg.solver);
  get("threads", cfg.threads);
  get("deterministic", cfg.deterministic);
  get("write_svg", cfg.write_svg);
  if (doc.contains("out_dir")) {
    std::string dir;
    get("out_dir", dir);
    cfg.out_dir = dir;
  }
  cfg.validate();
  return cfg;
}

std::uint64_t trial_seed(std::uint64_t base_seed, int m, int k, int n, int trial) {
  std::uint64_t h = splitmix64(base_seed);
  for (const auto v : {m, k, n, trial}) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)));
  return h;
}

Vec make_noise(int m, double eps, NoiseShape shape, std::uint64_t seed) {
  if (shape == NoiseShape::Constant) return Vec::Constant(m, eps);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vec xi(m);
  for (int l = 0; l < m; ++l) xi[l] = eps * unif(rng);
  return xi;
}

TrialOutcome run_trial(int m, int k, int n, SubspaceMode mode, std::uint64_t seed, double eps,
                       NoiseShape shape, const admm::AdmmConfig& solver) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemInstance inst = gen_instance(m, k, n, mode, seed);
  MeasurementSet meas = forward_measure(inst);
  TrialOutcome out;
  out.seed = seed;
  if (eps > 0.0) {
    const Vec xi = make_noise(m, eps, shape, splitmix64(seed ^ 0x6e6f697365ULL));
    out.noise_inf = xi.lpNorm<Eigen::Infinity>();
    meas = add_noise(meas, xi);
  }
  admm::AdmmConfig cfg = solver;
  cfg.init_seed = splitmix64(seed ^ cfg.init_seed);
  const admm::SolveReport rep = admm::solve_instance(inst, meas, cfg);
  out.converged = rep.converged;
  out.success = rep.errors->success;
  out.h_error = rep.errors->h_error;
  out.m_error = rep.errors->m_error;
  out.signal_error = rep.errors->signal_error();
  out.lifted_error = rep.errors->lifted_error;
  out.objective = rep.objective;
  out.trace_opt = 2.0 * std::sqrt(inst.h_true.squaredNorm() * inst.m_true.squaredNorm());
  out.iterations = rep.iterations;
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<std::tuple<int, int, int>> grid_cells(const ExperimentConfig& cfg) {
  std::vector<std::tuple<int, int, int>> cells;
  for (int m : cfg.m_values)
    for (const auto& [k, n] : cfg.kn_pairs)
      if (k <= m && n <= m) cells.emplace_back(m, k, n);
  return cells;
}

std::vector<CellResult> run_phase(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_out_dir(cfg.out_dir);
  const auto cells = grid_cells(cfg);
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);

  std::vector<TrialOutcome> outcomes(cells.size() * trials);
  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t idx) {
    const auto [m, k, n] = cells[idx / trials];
    const int t = static_cast<int>(idx % trials);
    outcomes[idx] = run_trial(m, k, n, cfg.subspace_mode, trial_seed(cfg.base_seed, m, k, n, t), 0.0,
                              cfg.noise_shape, cfg.solver);
  });

  std::vector<CellResult> results;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellResult r;
    std::tie(r.m, r.k, r.n) = cells[c];
    r.trials = cfg.trials;
    r.outcomes.assign(outcomes.begin() + static_cast<long>(c * trials),
                      outcomes.begin() + static_cast<long>((c + 1) * trials));
    std::vector<double> errs;
    for (const auto& o : r.outcomes) {
      r.success_count += o.success;
      errs.push_back(o.signal_error);
      r.mean_lifted_error += o.lifted_error;
      r.mean_iterations += o.iterations;
      r.wall_ms += cfg.deterministic ? 0.0 : o.wall_ms;
    }
    r.mean_error = std::accumulate(errs.begin(), errs.end(), 0.0) / cfg.trials;
    r.mean_lifted_error /= cfg.trials;
    r.mean_iterations /= cfg.trials;
    std::sort(errs.begin(), errs.end());
    r.median_error = errs.size() % 2 ? errs[errs.size() / 2]
                                     : 0.5 * (errs[errs.size() / 2 - 1] + errs[errs.size() / 2]);
    results.push_back(std::move(r));
  }

  std::ostringstream csv;
  csv << "m,k,n,trials,successes,mean_err,median_err,mean_iters,wall_ms\n";
  for (const auto& r : results)
    csv << r.m << ',' << r.k << ',' << r.n << ',' << r.trials << ',' << r.success_count << ','
        << fmt(r.mean_error) << ',' << fmt(r.median_error) << ',' << fmt(r.mean_iterations) << ','
        << fmt(r.wall_ms) << '\n';
  write_text(cfg.out_dir / "phase.csv", csv.str());
  write_text(cfg.out_dir / "phase_heatmap.csv", heatmap_csv(results));
  if (cfg.write_svg) write_text(cfg.out_dir / "phase.svg", heatmap_svg(results));

  json manifest;
  manifest["experiment"] = "phase";
  manifest["generator_id"] = std::string(generator_id());
  manifest["config"] = config_to_json(cfg);
  json jcells = json::array();
  for (const auto& r : results) {
    json trials_json = json::array();
    for (const auto& o : r.outcomes) trials_json.push_back(outcome_to_json(o, cfg.deterministic));
    jcells.push_back({{"m", r.m}, {"k", r.k}, {"n", r.n}, {"trials", trials_json}});
  }
  manifest["cells"] = jcells;
  io::write_json_file(cfg.out_dir / "manifest.json", manifest);
  return results;
}

std::vector<NoiseLevelResult> run_noise_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto cells = grid_cells(cfg);
  if (cells.size() != 1) throw ParseError("m_values/kn_pairs", "noise sweep needs exactly one (m, k, n) cell");
  if (cfg.noise_levels.empty() || cfg.noise_levels.front() != 0.0 ||
      !std::is_sorted(cfg.noise_levels.begin(), cfg.noise_levels.end()))
    throw ParseError("noise_levels", "must be ascending and start at 0");
  ensure_out_dir(cfg.out_dir);
  const auto [m, k, n] = cells.front();
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);

  std::vector<TrialOutcome> outcomes(cfg.noise_levels.size() * trials);
  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t idx) {
    const double eps = cfg.noise_levels[idx / trials];
    const int t = static_cast<int>(idx % trials);
    // The same instances are reused at every level; only ξ changes.
    outcomes[idx] = run_trial(m, k, n, cfg.subspace_mode, trial_seed(cfg.base_seed, m, k, n, t), eps,
                              cfg.noise_shape, cfg.solver);
  });

  std::vector<NoiseLevelResult> results;
  for (std::size_t li = 0; li < cfg.noise_levels.size(); ++li) {
    NoiseLevelResult r;
    r.eps = cfg.noise_levels[li];
    r.trials = cfg.trials;
    r.outcomes.assign(outcomes.begin() + static_cast<long>(li * trials),
                      outcomes.begin() + static_cast<long>((li + 1) * trials));
    for (const auto& o : r.outcomes) {
      r.mean_lifted_error += o.lifted_error;
      r.max_lifted_error = std::max(r.max_lifted_error, o.lifted_error);
      if (o.lifted_error > kNoiseBoundConstant * o.noise_inf + kBoundSlack) ++r.bound_violations;
    }
    r.mean_lifted_error /= cfg.trials;
    results.push_back(std::move(r));
  }

  std::ostringstream csv;
  csv << "eps,trials,mean_lifted_err,max_lifted_err,bound_violations\n";
  for (const auto& r : results)
    csv << fmt(r.eps) << ',' << r.trials << ',' << fmt(r.mean_lifted_error) << ','
        << fmt(r.max_lifted_error) << ',' << r.bound_violations << '\n';
  write_text(cfg.out_dir / "noise.csv", csv.str());

  json manifest;
  manifest["experiment"] = "noise-sweep";
  manifest["generator_id"] = std::string(generator_id());
  manifest["config"] = config_to_json(cfg);
  manifest["bound_constant"] = kNoiseBoundConstant;
  json levels = json::array();
  for (const auto& r : results) {
    json trials_json = json::array();
    for (const auto& o : r.outcomes) trials_json.push_back(outcome_to_json(o, cfg.deterministic));
    levels.push_back({{"eps", r.eps}, {"m", m}, {"k", k}, {"n", n}, {"trials", trials_json}});
  }
  manifest["levels"] = levels;
  io::write_json_file(cfg.out_dir / "manifest.json", manifest);
  return results;
}

std::string summarize(const ProblemInstance& inst, const admm::SolveReport& rep) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "instance   m=" << inst.m << " k=" << inst.k << " n=" << inst.n << " mode=" << to_string(inst.subspace_mode)
     << " seed=" << inst.seed << '\n';
  os << "solver     converged=" << (rep.converged ? "yes" : "no") << " iterations=" << rep.iterations
     << " rho=" << rep.final_rho << '\n';
  os << "residuals  primal=" << rep.primal_residual << " dual=" << rep.dual_residual << '\n';
  os << "objective  " << rep.objective << " (Tr H=" << rep.H_hat.trace() << ", Tr M=" << rep.M_hat.trace() << ")\n";
  os << "eigengap   h: lambda2/lambda1=" << rep.h_rank1.eigen_ratio()
     << "  m: lambda2/lambda1=" << rep.m_rank1.eigen_ratio() << '\n';
  if (rep.errors) {
    os << "errors     h=" << rep.errors->h_error << " m=" << rep.errors->m_error
       << " lifted=" << rep.errors->lifted_error << " alpha=" << rep.errors->alpha << '\n';
    os << "success    " << (rep.errors->success ? "yes" : "no") << '\n';
  }
  return os.str();
}

admm::SolveReport run_single(const SingleRunOptions& opts) {
  ensure_out_dir(opts.out_dir);
  const ProblemInstance inst = opts.instance_file ? io::load_instance(*opts.instance_file)
                                                  : gen_instance(opts.m, opts.k, opts.n, opts.mode, opts.seed);
  MeasurementSet meas = forward_measure(inst);
  if (opts.noise_eps > 0.0)
    meas = add_noise(meas, make_noise(inst.m, opts.noise_eps, opts.noise_shape, splitmix64(inst.seed ^ 0x6e6f697365ULL)));
  const admm::SolveReport rep = admm::solve_instance(inst, meas, opts.solver);
  json doc = io::report_to_json(rep, opts.include_factors);
  doc["instance"] = io::instance_to_json(inst, false);
  doc["solver"] = io::config_to_json(opts.solver);
  io::write_json_file(opts.out_dir / "report.json", doc);
  write_text(opts.out_dir / "summary.txt", summarize(inst, rep));
  return rep;
}

std::vector<std::pair<int, double>> rates_by_total_dim(const std::vector<CellResult>& cells, int m) {
  std::vector<std::pair<int, double>> out;
  for (const auto& c : cells)
    if (c.m == m) out.emplace_back(c.k + c.n, c.success_rate());
  std::sort(out.begin(), out.end());
  return out;
}

MonotonicityCheck check_monotone(const std::vector<std::pair<int, double>>& rates) {
  MonotonicityCheck out;
  for (std::size_t i = 1; i < rates.size(); ++i) {
    const double rise = rates[i].second - rates[i - 1].second;
    if (rise > 0.0) {
      ++out.inversions;
      out.worst_inversion = std::max(out.worst_inversion, rise);
    }
  }
  return out;
}

std::optional<double> half_success_crossing(const std::vector<std::pair<int, double>>& rates) {
  if (rates.empty()) return std::nullopt;
  if (rates.front().second < 0.5) return rates.front().first;
  for (std::size_t i = 1; i < rates.size(); ++i) {
    const auto [x0, r0] = rates[i - 1];
    const auto [x1, r1] = rates[i];
    if (r0 >= 0.5 && r1 < 0.5) return x0 + (r0 - 0.5) / (r0 - r1) * (x1 - x0);
  }
  return std::nullopt;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  require_dims(a.size() == b.size() && a.size() >= 2, "spearman: need two equal-length samples");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace phaseconv::bench
