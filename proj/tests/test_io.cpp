#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "phaseconv/instance_io.hpp"

using namespace phaseconv;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "phaseconv_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void check_same(const ProblemInstance& a, const ProblemInstance& b) {
  CHECK(a.m == b.m);
  CHECK(a.k == b.k);
  CHECK(a.n == b.n);
  CHECK(a.subspace_mode == b.subspace_mode);
  CHECK(a.seed == b.seed);
  CHECK(a.h_true == b.h_true);
  CHECK(a.m_true == b.m_true);
  CHECK(a.b_rows.re() == b.b_rows.re());
  CHECK(a.b_rows.im() == b.b_rows.im());
  CHECK(a.c_rows.re() == b.c_rows.re());
  CHECK(a.c_rows.im() == b.c_rows.im());
  CHECK(a.basis_b == b.basis_b);
  CHECK(a.basis_c == b.basis_c);
}

}  // namespace

TEST_CASE("instance round trip") {
  for (auto mode : {SubspaceMode::GaussianRows, SubspaceMode::FourierIdentityB, SubspaceMode::FourierGaussian}) {
    const auto inst = gen_instance(12, 3, 2, mode, 99);
    const auto path = scratch("inst.json");
    io::save_instance(path, inst);
    check_same(inst, io::load_instance(path));
    io::save_instance(path, inst, false);
    const auto doc = io::read_json_file(path);
    CHECK_FALSE(doc.contains("b_rows_re"));
    check_same(inst, io::load_instance(path));
  }
}

TEST_CASE("foreign generator cannot be regenerated") {
  auto doc = io::instance_to_json(gen_instance(8, 2, 2, SubspaceMode::GaussianRows, 1), false);
  doc["generator_id"] = "other";
  try {
    io::instance_from_json(doc);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.where() == "generator_id");
  }
  // Materialized instances load regardless of where they came from.
  auto full = io::instance_to_json(gen_instance(8, 2, 2, SubspaceMode::GaussianRows, 1));
  full["generator_id"] = "other";
  CHECK(io::instance_from_json(full).generator_id == "other");
}

TEST_CASE("malformed instance files") {
  const auto path = scratch("bad.json");
  {
    std::ofstream out(path);
    out << "{\n  \"m\": 8,\n  \"k\": 2,\n  \"n\": oops\n}\n";
  }
  try {
    io::load_instance(path);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.where()).find("line 4") != std::string::npos);
  }

  auto doc = io::instance_to_json(gen_instance(8, 2, 2, SubspaceMode::GaussianRows, 1));
  doc.erase("h_true");
  try {
    io::instance_from_json(doc);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.where() == "h_true");
  }

  doc = io::instance_to_json(gen_instance(8, 2, 2, SubspaceMode::GaussianRows, 1));
  doc["b_rows_re"][3] = {1.0};
  CHECK_THROWS_AS(io::instance_from_json(doc), ParseError);

  doc = io::instance_to_json(gen_instance(8, 2, 2, SubspaceMode::GaussianRows, 1));
  doc["m_true"][0] = "x";
  try {
    io::instance_from_json(doc);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.where() == "m_true[0]");
  }

  CHECK_THROWS_AS(io::load_instance(scratch("missing.json")), ParseError);
}

TEST_CASE("solver config round trip") {
  admm::AdmmConfig cfg;
  cfg.rho = 2.5;
  cfg.max_iter = 17;
  cfg.rank_override = 3;
  cfg.residual_balancing = false;
  cfg.inner.max_inner = 42;
  cfg.init_seed = 12345;
  const auto back = io::config_from_json(io::config_to_json(cfg));
  CHECK(back.rho == 2.5);
  CHECK(back.max_iter == 17);
  CHECK(back.rank_override == 3);
  CHECK_FALSE(back.residual_balancing);
  CHECK(back.inner.max_inner == 42);
  CHECK(back.init_seed == 12345u);

  nlohmann::json partial = {{"rho", 0.5}};
  CHECK(io::config_from_json(partial).rho == 0.5);
  CHECK(io::config_from_json(partial).max_iter == admm::AdmmConfig{}.max_iter);
  CHECK_THROWS_AS(io::config_from_json({{"rho", -1.0}}), ParseError);
  CHECK_THROWS_AS(io::config_from_json({{"rho", "fast"}}), ParseError);
}
