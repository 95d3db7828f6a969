#include "phaseconv/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace phaseconv::io {

namespace {

template <class T>
T get_field(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ParseError(key, "missing required field");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(key, e.what());
  }
}

const json& require(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ParseError(key, "missing required field");
  return doc[key];
}

}  // namespace

json vec_to_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vec vec_from_json(const json& doc, const std::string& field) {
  if (!doc.is_array()) throw ParseError(field, "expected an array of numbers");
  Vec out(static_cast<Eigen::Index>(doc.size()));
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number()) throw ParseError(field + "[" + std::to_string(i) + "]", "expected a number");
    out[static_cast<Eigen::Index>(i)] = doc[i].get<double>();
  }
  return out;
}

json mat_to_json(const Mat& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) rows.push_back(vec_to_json(M.row(i).transpose()));
  return rows;
}

Mat mat_from_json(const json& doc, const std::string& field) {
  if (!doc.is_array()) throw ParseError(field, "expected an array of rows");
  if (doc.empty()) return Mat();
  const std::size_t cols = doc[0].is_array() ? doc[0].size() : 0;
  Mat out(static_cast<Eigen::Index>(doc.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = field + "[" + std::to_string(i) + "]";
    const Vec row = vec_from_json(doc[i], where);
    if (static_cast<std::size_t>(row.size()) != cols) throw ParseError(where, "ragged matrix row");
    out.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return out;
}

json instance_to_json(const ProblemInstance& inst, bool materialize) {
  json doc;
  doc["m"] = inst.m;
  doc["k"] = inst.k;
  doc["n"] = inst.n;
  doc["subspace_mode"] = std::string(to_string(inst.subspace_mode));
  doc["seed"] = inst.seed;
  doc["generator_id"] = inst.generator_id;
  if (materialize) {
    doc["h_true"] = vec_to_json(inst.h_true);
    doc["m_true"] = vec_to_json(inst.m_true);
    doc["b_rows_re"] = mat_to_json(inst.b_rows.re());
    doc["c_rows_re"] = mat_to_json(inst.c_rows.re());
    if (inst.b_rows.is_complex()) doc["b_rows_im"] = mat_to_json(inst.b_rows.im());
    if (inst.c_rows.is_complex()) doc["c_rows_im"] = mat_to_json(inst.c_rows.im());
    if (inst.has_time_domain()) {
      doc["basis_b"] = mat_to_json(inst.basis_b);
      doc["basis_c"] = mat_to_json(inst.basis_c);
    }
  }
  return doc;
}

ProblemInstance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("instance", "expected a JSON object");
  const int m = get_field<int>(doc, "m");
  const int k = get_field<int>(doc, "k");
  const int n = get_field<int>(doc, "n");
  const SubspaceMode mode = subspace_mode_from_string(get_field<std::string>(doc, "subspace_mode"));
  const auto seed = get_field<std::uint64_t>(doc, "seed");
  const std::string gen = doc.contains("generator_id") ? get_field<std::string>(doc, "generator_id")
                                                       : std::string(generator_id());

  if (!doc.contains("b_rows_re")) {
    if (gen != generator_id())
      throw ParseError("generator_id", "instance was generated by '" + gen +
                                           "' and is not materialized; cannot regenerate");
    try {
      return gen_instance(m, k, n, mode, seed);
    } catch (const DimensionError& e) {
      throw ParseError("m/k/n", e.what());
    }
  }

  ProblemInstance inst;
  inst.m = m;
  inst.k = k;
  inst.n = n;
  inst.subspace_mode = mode;
  inst.seed = seed;
  inst.generator_id = gen;
  inst.h_true = vec_from_json(require(doc, "h_true"), "h_true");
  inst.m_true = vec_from_json(require(doc, "m_true"), "m_true");
  Mat b_im, c_im;
  if (doc.contains("b_rows_im")) b_im = mat_from_json(doc["b_rows_im"], "b_rows_im");
  if (doc.contains("c_rows_im")) c_im = mat_from_json(doc["c_rows_im"], "c_rows_im");
  try {
    inst.b_rows = FunctionalFamily(mat_from_json(require(doc, "b_rows_re"), "b_rows_re"), b_im);
    inst.c_rows = FunctionalFamily(mat_from_json(require(doc, "c_rows_re"), "c_rows_re"), c_im);
  } catch (const DimensionError& e) {
    throw ParseError("b_rows/c_rows", e.what());
  }
  if (doc.contains("basis_b")) inst.basis_b = mat_from_json(doc["basis_b"], "basis_b");
  if (doc.contains("basis_c")) inst.basis_c = mat_from_json(doc["basis_c"], "basis_c");
  try {
    inst.validate();
  } catch (const DimensionError& e) {
    throw ParseError("instance", e.what());
  }
  return inst;
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(source + ": line " + std::to_string(line) + ", column " + std::to_string(col),
                     e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path.string());
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void save_instance(const std::filesystem::path& path, const ProblemInstance& inst, bool materialize) {
  write_json_file(path, instance_to_json(inst, materialize));
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json_file(path));
}

json config_to_json(const admm::AdmmConfig& cfg) {
  json doc;
  doc["rho"] = cfg.rho;
  doc["max_iter"] = cfg.max_iter;
  doc["tol_primal"] = cfg.tol_primal;
  doc["tol_dual"] = cfg.tol_dual;
  doc["rank_override"] = cfg.rank_override ? json(*cfg.rank_override) : json(nullptr);
  doc["deterministic"] = cfg.deterministic;
  doc["residual_balancing"] = cfg.residual_balancing;
  doc["balance_ratio"] = cfg.balance_ratio;
  doc["balance_factor"] = cfg.balance_factor;
  doc["inner_g_tol"] = cfg.inner.g_tol;
  doc["inner_max_iter"] = cfg.inner.max_inner;
  doc["inner_memory"] = cfg.inner.memory;
  doc["inner_max_escapes"] = cfg.inner.max_escapes;
  doc["inner_tol_start"] = cfg.inner_tol_start;
  doc["inner_tol_decay"] = cfg.inner_tol_decay;
  doc["init_seed"] = cfg.init_seed;
  return doc;
}

admm::AdmmConfig config_from_json(const json& doc, admm::AdmmConfig cfg) {
  if (!doc.is_object()) throw ParseError("solver", "expected a JSON object");
  auto opt = [&](const char* key, auto& field) {
    if (doc.contains(key)) field = get_field<std::decay_t<decltype(field)>>(doc, key);
  };
  opt("rho", cfg.rho);
  opt("max_iter", cfg.max_iter);
  opt("tol_primal", cfg.tol_primal);
  opt("tol_dual", cfg.tol_dual);
  if (doc.contains("rank_override")) {
    if (doc["rank_override"].is_null())
      cfg.rank_override.reset();
    else
      cfg.rank_override = get_field<int>(doc, "rank_override");
  }
  opt("deterministic", cfg.deterministic);
  opt("residual_balancing", cfg.residual_balancing);
  opt("balance_ratio", cfg.balance_ratio);
  opt("balance_factor", cfg.balance_factor);
  opt("inner_g_tol", cfg.inner.g_tol);
  opt("inner_max_iter", cfg.inner.max_inner);
  opt("inner_memory", cfg.inner.memory);
  opt("inner_max_escapes", cfg.inner.max_escapes);
  opt("inner_tol_start", cfg.inner_tol_start);
  opt("inner_tol_decay", cfg.inner_tol_decay);
  opt("init_seed", cfg.init_seed);
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw ParseError("solver", e.what());
  }
  return cfg;
}

json report_to_json(const admm::SolveReport& rep, bool include_factors) {
  json doc;
  doc["converged"] = rep.converged;
  doc["iterations"] = rep.iterations;
  doc["objective"] = rep.objective;
  doc["trace_h"] = rep.H_hat.trace();
  doc["trace_m"] = rep.M_hat.trace();
  doc["final_rho"] = rep.final_rho;
  doc["primal_residual"] = rep.primal_residual;
  doc["dual_residual"] = rep.dual_residual;
  doc["inner_nonconverged"] = rep.inner_nonconverged;
  doc["inner_line_search_failures"] = rep.inner_line_search_failures;
  doc["alpha_align"] = std::isfinite(rep.alpha_align) ? json(rep.alpha_align) : json(nullptr);
  doc["h_hat"] = vec_to_json(rep.h_hat);
  doc["m_hat"] = vec_to_json(rep.m_hat);
  doc["eigen"] = {
      {"h_lambda1", rep.h_rank1.lambda1}, {"h_lambda2", rep.h_rank1.lambda2},
      {"h_degenerate", rep.h_rank1.degenerate}, {"m_lambda1", rep.m_rank1.lambda1},
      {"m_lambda2", rep.m_rank1.lambda2}, {"m_degenerate", rep.m_rank1.degenerate},
      {"h_eigen_ratio", rep.h_rank1.eigen_ratio()}, {"m_eigen_ratio", rep.m_rank1.eigen_ratio()}};
  if (rep.errors) {
    const admm::ErrorMetrics& e = *rep.errors;
    doc["errors"] = {{"alpha", e.alpha},          {"lifted_error", e.lifted_error},
                     {"lifted_error_raw", e.lifted_error_raw}, {"h_error", e.h_error},
                     {"m_error", e.m_error},      {"success", e.success}};
  } else {
    doc["errors"] = nullptr;
  }
  doc["residuals"] = {{"primal", rep.primal_history}, {"dual", rep.dual_history}, {"rho", rep.rho_history}};
  if (include_factors) {
    doc["V1"] = mat_to_json(rep.H_hat.V);
    doc["V2"] = mat_to_json(rep.M_hat.V);
  }
  return doc;
}

}  // namespace phaseconv::io
