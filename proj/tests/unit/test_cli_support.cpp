#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hessianlab/expression.hpp"
#include "hessianlab/families.hpp"
#include "hessianlab/grid_function.hpp"
#include "hessianlab/io.hpp"

#include "../support/oracles.hpp"

namespace {

hessianlab::Vec point(std::initializer_list<double> xs) {
  hessianlab::Vec x(static_cast<int>(xs.size()));
  int i = 0;
  for (double v : xs) x[i++] = v;
  return x;
}

double eval(const std::string& src, int dim, std::initializer_list<double> xs) {
  return hessianlab::parse_expression(src, dim)->eval(point(xs));
}

std::filesystem::path temp_file(const std::string& stem) {
  return std::filesystem::temp_directory_path() / stem;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("expression grammar respects precedence and associativity") {
  CHECK(eval("2 + 3*4", 1, {0.0}) == 14.0);
  CHECK(eval("2*3 + 4", 1, {0.0}) == 10.0);
  CHECK(eval("1 - 2 - 3", 1, {0.0}) == -4.0);
  CHECK(eval("6/3/2", 1, {0.0}) == 1.0);
  CHECK(eval("2^3^2", 1, {0.0}) == 512.0);  // right-assoc exponent

  // Unary minus binds looser than ^, and a ^ exponent may itself be signed.
  CHECK(eval("-x1^2", 1, {3.0}) == -9.0);
  CHECK(eval("x1^-2", 1, {2.0}) == 0.25);
  CHECK(eval("(-x1)^2", 1, {3.0}) == 9.0);

  CHECK(eval("x1^2 + x2^2", 3, {1.0, 2.0, 5.0}) == 5.0);
  CHECK(eval("0.5*x1*x2 - x3", 3, {4.0, 3.0, 1.0}) == 5.0);
  CHECK(eval("--x1", 1, {2.5}) == 2.5);
}

TEST_CASE("expression grammar evaluates abs and max") {
  CHECK(eval("abs(x3)", 3, {9.0, 9.0, -2.0}) == 2.0);
  CHECK(eval("max(x1, x2, 3)", 2, {1.0, 2.0}) == 3.0);
  CHECK(eval("max(x1, x2, 3)", 2, {7.0, 2.0}) == 7.0);
  CHECK(eval("max(abs(x1 - 1), x2^2)", 2, {-2.0, 1.5}) == 3.0);
  CHECK(eval("abs(-x1) + max(x1, -x1)", 1, {-4.0}) == 8.0);
}

TEST_CASE("expression parser rejects malformed input with positions") {
  using Catch::Matchers::ContainsSubstring;
  auto parse = [](const std::string& src, int dim) { return hessianlab::parse_expression(src, dim); };

  CHECK_THROWS_WITH(parse("1 +", 1), ContainsSubstring("position"));
  CHECK_THROWS_WITH(parse("(x1", 1), ContainsSubstring("position"));
  CHECK_THROWS_WITH(parse("x1 x2", 2), ContainsSubstring("position"));
  CHECK_THROWS_WITH(parse("x1 $ 2", 1), ContainsSubstring("position"));
  CHECK_THROWS_WITH(parse("abs(x1, x2)", 2), ContainsSubstring("abs"));
  CHECK_THROWS_WITH(parse("max(x1)", 1), ContainsSubstring("max"));

  // Variable indices are 1-based and checked against the dimension at parse time.
  CHECK_THROWS_WITH(parse("x0", 2), ContainsSubstring("x0"));
  CHECK_THROWS_WITH(parse("x4", 3), ContainsSubstring("x4"));
  CHECK_THROWS_AS(hessianlab::parse_expression("x1", 0), std::invalid_argument);
}

TEST_CASE("expression fields wrap parsed formulas") {
  const hessianlab::FieldPtr f = hessianlab::expression_field("x1^2 - 0.5*x2", 2);
  REQUIRE(f->dim() == 2);
  CHECK(f->value(point({3.0, 4.0})) == 7.0);
}

TEST_CASE("field specs build every documented family") {
  using nlohmann::json;

  const auto c = hessianlab::make_field(json{{"type", "constant"}, {"value", 2.5}}, 3);
  CHECK(c->value(point({1.0, 2.0, 3.0})) == 2.5);

  const json qspec = {{"type", "quadratic"},
                      {"matrix", {{2.0, 1.0}, {1.0, 4.0}}},
                      {"linear", {1.0, -1.0}},
                      {"constant", 0.5}};
  const auto q = hessianlab::make_field(qspec, 2);
  // value = x.Ax/2 + b.x + c at (1, 2): (2 + 4 + 16)/2 + (1 - 2) + 0.5
  CHECK(q->value(point({1.0, 2.0})) == Catch::Approx(10.5).epsilon(1e-14));

  const auto sharp = hessianlab::make_field(json{{"type", "sharp-example"}}, 3);
  CHECK(sharp->value(point({1.0, 2.0, 9.0})) == 5.0);

  const auto cone = hessianlab::make_field(json{{"type", "cone"}, {"scale", 2.0}}, 2);
  CHECK(cone->value(point({3.0, 4.0})) == Catch::Approx(10.0).epsilon(1e-14));

  const auto expr = hessianlab::make_field(json{{"type", "expression"}, {"formula", "abs(x3)"}}, 3);
  CHECK(expr->value(point({0.0, 0.0, -1.5})) == 1.5);
}

TEST_CASE("field specs validate their input") {
  using Catch::Matchers::ContainsSubstring;
  using nlohmann::json;

  CHECK_THROWS_WITH(hessianlab::make_field(json{{"type", "warp"}}, 2),
                    ContainsSubstring("unknown type"));
  CHECK_THROWS_AS(hessianlab::make_field(json::array(), 2), std::invalid_argument);
  CHECK_THROWS_AS(hessianlab::make_field(json{{"value", 1.0}}, 2), std::invalid_argument);

  const json skew = {{"type", "quadratic"}, {"matrix", {{1.0, 2.0}, {0.0, 1.0}}}};
  CHECK_THROWS_WITH(hessianlab::make_field(skew, 2), ContainsSubstring("symmetric"));

  const json ragged = {{"type", "quadratic"}, {"matrix", {{1.0, 0.0}, {0.0}}}};
  CHECK_THROWS_AS(hessianlab::make_field(ragged, 2), std::invalid_argument);

  const json short_linear = {{"type", "quadratic"}, {"linear", {1.0}}};
  CHECK_THROWS_WITH(hessianlab::make_field(short_linear, 2), ContainsSubstring("linear"));

  CHECK_THROWS_AS(hessianlab::make_field(json{{"type", "expression"}}, 2), std::invalid_argument);
  CHECK_THROWS_AS(hessianlab::make_field(json{{"type", "sharp-example"}}, 1), std::invalid_argument);
}

TEST_CASE("generated quadratic families normalize to unit operator value") {
  const auto family = hessianlab::unit_sigma2_quadratics(4, 6, 7u);
  REQUIRE(family.size() == 6);
  for (const auto& q : family) {
    CHECK(oracles::close_rel(hessianlab::sigma_k(q.hessian(), 2), 1.0, 1e-12));
    CHECK(q.linear().norm() == 0.0);
    CHECK(q.constant() == 0.0);
  }

  // The tail members are the controlled degenerations: a cylinder over a
  // near-flat subspace and an exact one.
  const Eigen::MatrixXd tail = family[5].hessian().dense();
  CHECK(tail(2, 2) == 0.0);
  CHECK(tail(3, 3) == 0.0);
  CHECK(family[4].hessian().dense()(2, 2) > 0.0);
  CHECK(family[4].hessian().dense()(2, 2) < 1e-2);

  const auto rerun = hessianlab::unit_sigma2_quadratics(4, 6, 7u);
  for (std::size_t m = 0; m < family.size(); ++m)
    CHECK((family[m].hessian().dense() - rerun[m].hessian().dense()).norm() == 0.0);

  const auto other = hessianlab::unit_sigma2_quadratics(4, 6, 8u);
  CHECK((family[0].hessian().dense() - other[0].hessian().dense()).norm() > 1e-6);

  CHECK_THROWS_AS(hessianlab::unit_sigma2_quadratics(1, 6, 7u), std::invalid_argument);
  CHECK_THROWS_AS(hessianlab::unit_sigma2_quadratics(3, 2, 7u), std::invalid_argument);
}

TEST_CASE("solved quadratic families reproduce their boundary traces") {
  const auto family = hessianlab::unit_sigma2_quadratics(2, 3, 11u);
  const auto solved = hessianlab::solve_quadratic_family(family, 2, 12);
  REQUIRE(solved.size() == family.size());
  for (std::size_t m = 0; m < solved.size(); ++m) {
    const auto& u = solved[m];
    const auto& g = u.grid();
    double worst = 0.0;
    for (std::size_t f = 0; f < g.node_count(); ++f)
      if (u.defined(f)) worst = std::max(worst, std::abs(u.value(f) - family[m].value(g.coord(f))));
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("grid snapshots survive a write and read cycle") {
  const auto g = std::make_shared<const hessianlab::Grid>(
      2, hessianlab::Domain{hessianlab::DomainKind::kBall, 1.0}, 12);
  const hessianlab::CallableField f(2, [](const hessianlab::Vec& x) {
    return x[0] * x[0] - 0.5 * x[1] * x[1] + x[0];
  });
  hessianlab::GridFunction u = hessianlab::sample_field(g, f);

  const auto path = temp_file("hessianlab_roundtrip.hgf1");
  hessianlab::write_grid_function(path.string(), u);
  const hessianlab::GridFunction v = hessianlab::read_grid_function(path.string());

  REQUIRE(v.grid().dim() == 2);
  REQUIRE(v.grid().node_count() == g->node_count());
  REQUIRE(v.grid().cut_count() == g->cut_count());
  CHECK(v.grid().spacing() == g->spacing());
  for (std::size_t fl = 0; fl < g->node_count(); ++fl) {
    REQUIRE(v.defined(fl) == u.defined(fl));
    if (u.defined(fl)) CHECK(v.value(fl) == u.value(fl));
  }
  for (std::size_t id = 0; id < g->cut_count(); ++id) CHECK(v.cut_value(id) == u.cut_value(id));
  std::filesystem::remove(path);
}

TEST_CASE("grid snapshots preserve undefined nodes") {
  const auto g = std::make_shared<const hessianlab::Grid>(
      2, hessianlab::Domain{hessianlab::DomainKind::kBox, 1.0}, 8);
  hessianlab::GridFunction u(g);
  u.set(0, 3.0);
  u.set(5, -1.25);

  const auto path = temp_file("hessianlab_sparse.hgf1");
  hessianlab::write_grid_function(path.string(), u);
  const hessianlab::GridFunction v = hessianlab::read_grid_function(path.string());
  CHECK(v.defined(0));
  CHECK(v.value(0) == 3.0);
  CHECK(v.value(5) == -1.25);
  CHECK_FALSE(v.defined(1));
  std::size_t defined = 0;
  for (std::size_t fl = 0; fl < g->node_count(); ++fl) defined += v.defined(fl) ? 1 : 0;
  CHECK(defined == 2);
  std::filesystem::remove(path);
}

TEST_CASE("grid snapshots reject corrupt files") {
  using Catch::Matchers::ContainsSubstring;

  const auto bad = temp_file("hessianlab_bad.hgf1");
  {
    std::ofstream out(bad, std::ios::binary);
    out << "JUNKJUNKJUNKJUNKJUNKJUNK";
  }
  CHECK_THROWS_WITH(hessianlab::read_grid_function(bad.string()), ContainsSubstring("magic"));
  std::filesystem::remove(bad);

  const auto g = std::make_shared<const hessianlab::Grid>(
      2, hessianlab::Domain{hessianlab::DomainKind::kBox, 1.0}, 8);
  hessianlab::GridFunction u(g);
  const auto whole = temp_file("hessianlab_whole.hgf1");
  hessianlab::write_grid_function(whole.string(), u);
  const auto cut = temp_file("hessianlab_cut.hgf1");
  {
    std::ifstream in(whole, std::ios::binary);
    std::vector<char> bytes(40);
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    std::ofstream out(cut, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_WITH(hessianlab::read_grid_function(cut.string()), ContainsSubstring("truncated"));
  CHECK_THROWS_AS(hessianlab::read_grid_function(temp_file("hessianlab_missing.hgf1").string()),
                  std::runtime_error);
  std::filesystem::remove(whole);
  std::filesystem::remove(cut);
}

TEST_CASE("config hashes are stable and key-order independent") {
  nlohmann::json a;
  a["n"] = 3;
  a["resolution"] = 32;
  nlohmann::json b;
  b["resolution"] = 32;
  b["n"] = 3;

  const std::string ha = hessianlab::config_hash(a);
  CHECK(ha.size() == 16);
  CHECK(ha.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(ha == hessianlab::config_hash(b));

  b["n"] = 4;
  CHECK(ha != hessianlab::config_hash(b));

  const nlohmann::json env = hessianlab::report_envelope("solve", a);
  CHECK(env.at("toolkit") == hessianlab::kToolkitName);
  CHECK(env.at("version") == hessianlab::kVersion);
  CHECK(env.at("command") == "solve");
  CHECK(env.at("config_hash") == ha);
}

TEST_CASE("csv tables serialize with fixed columns") {
  hessianlab::CsvWriter csv({"member", "delta"});
  csv.add_row({0.0, 0.5});
  csv.add_row({1.0, 0.125});
  CHECK_THROWS_AS(csv.add_row({1.0}), std::invalid_argument);

  const auto path = temp_file("hessianlab_table.csv");
  csv.write(path.string());
  CHECK(slurp(path) == "member,delta\n0,0.5\n1,0.125\n");
  std::filesystem::remove(path);

  const auto jpath = temp_file("hessianlab_report.json");
  hessianlab::write_json(jpath.string(), nlohmann::json{{"ok", true}});
  const std::string text = slurp(jpath);
  CHECK(text.back() == '\n');
  CHECK(nlohmann::json::parse(text).at("ok") == true);
  std::filesystem::remove(jpath);
}
