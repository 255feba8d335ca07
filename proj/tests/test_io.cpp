#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fastlim/config.hpp"
#include "fastlim/expr.hpp"
#include "fastlim/ini.hpp"
#include "fastlim/snapshot.hpp"
#include "fastlim/svg.hpp"

using namespace fastlim;

namespace {

namespace fs = std::filesystem;

std::string minimal_config() {
  return R"(# minimal run config
[parameters]
d1 = 0.05
d2 = 0.1
d3 = 0.03
r0 = 2
eta = 1
alpha = 3
xi = 1
gamma = 1
Gamma = 1.5
mu = 0.4
eps = 1e-3

[grid]
cells = 32
extent = 1.0

[solver]
dt = 2e-4
t_end = 0.01

[initial]
N = 0.5 + 0.3*cos(pi*x)
P = 0.4 + 0.2*cos(2*pi*x)
)";
}

std::string temp_dir() {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / ("fastlim_io_test_" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("expression parser") {
  const Expr e = Expr::parse("0.5 + 0.3*cos(pi*x/L)");
  CHECK(e.eval(0.0, 0.0, 1.0, 0.0) == doctest::Approx(0.8));
  CHECK(e.eval(1.0, 0.0, 1.0, 0.0) == doctest::Approx(0.2));

  const Expr g = Expr::parse("2*exp(-((x-0.5)/0.1)^2)");
  CHECK(g.eval(0.5, 0, 1, 0) == doctest::Approx(2.0));
  CHECK(g.eval(0.6, 0, 1, 0) == doctest::Approx(2.0 * std::exp(-1.0)));

  CHECK(Expr::parse("-x + +3").eval(1.0, 0, 1, 0) == doctest::Approx(2.0));
  CHECK(Expr::parse("2^3^2").eval(0, 0, 1, 0) == doctest::Approx(512.0)); // right assoc
  CHECK(Expr::parse("y*Ly").eval(0, 3.0, 1, 2.0) == doctest::Approx(6.0));

  CHECK_THROWS_AS(Expr::parse("0.5 +"), std::invalid_argument);
  CHECK_THROWS_AS(Expr::parse("cos 3"), std::invalid_argument);
  CHECK_THROWS_AS(Expr::parse("blah(3)"), std::invalid_argument);
  CHECK_THROWS_AS(Expr::parse("(1+2"), std::invalid_argument);
}

TEST_CASE("ini parsing errors carry line numbers") {
  SUBCASE("duplicate key reports both lines") {
    const std::string text = "[a]\nk = 1\nj = 2\nk = 3\n";
    try {
      IniDocument::parse(text);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("line 4") != std::string::npos);
      CHECK(msg.find("line 2") != std::string::npos);
      CHECK(msg.find("duplicate key 'k'") != std::string::npos);
    }
  }

  SUBCASE("key outside a section") {
    CHECK_THROWS_AS(IniDocument::parse("k = 1\n"), ConfigError);
  }

  SUBCASE("malformed line") {
    try {
      IniDocument::parse("[a]\nnonsense\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
}

TEST_CASE("run config parsing") {
  SUBCASE("minimal config gets documented defaults") {
    const RunConfig cfg = parse_run_config(minimal_config());
    CHECK(cfg.prm.alpha == 3.0);
    CHECK(cfg.prm.p_energy == 2.0); // xi > 0 default
    CHECK(cfg.grid.nx == 32);
    CHECK(cfg.solver.splitting == Splitting::strang);
    CHECK(cfg.solver.diffusion == DiffusionScheme::implicit);
    CHECK(cfg.solver.output_stride == 1);
    CHECK(cfg.cross_slope_bound == 1.0);
    CHECK(cfg.init.on_manifold);
    CHECK(cfg.init.noise_amp == 0.0);
    CHECK(cfg.warnings.empty()); // d3 < d2 holds here
  }

  SUBCASE("xi = -1 is a validation error naming the field") {
    std::string text = minimal_config();
    text.replace(text.find("xi = 1"), 6, "xi = -1");
    try {
      parse_run_config(text);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("parameters.xi") != std::string::npos);
    }
  }

  SUBCASE("unknown keys are rejected with their line") {
    std::string text = minimal_config();
    text += "\n[solver2]\nx = 1\n";
    CHECK_THROWS_AS(parse_run_config(text), ConfigError);

    std::string text2 = minimal_config();
    text2 += "\n[diagnostics]\ntypo_key = 1\n";
    try {
      parse_run_config(text2);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("typo_key") != std::string::npos);
      CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
  }

  SUBCASE("duplicate key is caught during parsing") {
    std::string text = minimal_config();
    text += "\n[diagnostics]\nenergy = on\nenergy = off\n";
    CHECK_THROWS_AS(parse_run_config(text), ConfigError);
  }

  SUBCASE("2-D grids parse") {
    std::string text = minimal_config();
    text.replace(text.find("cells = 32"), 10,
                 "dim = 2\ncells = 16\ncells_y = 12\nextent_y = 2.0");
    const std::string n_line = "N = 0.5 + 0.3*cos(pi*x)";
    text.replace(text.find(n_line), n_line.size(),
                 "N = 0.5 + 0.1*cos(pi*x)*cos(pi*y/Ly)");
    const RunConfig cfg = parse_run_config(text);
    CHECK(cfg.grid.dim == 2);
    CHECK(cfg.grid.ny == 12);
    CHECK(cfg.grid.Ly == 2.0);
    const InitialFields f = build_initial_fields(cfg.init, cfg.grid, cfg.prm);
    CHECK(f.N.size() == 16 * 12);
  }

  SUBCASE("d3 >= d2 surfaces a warning unless overridden") {
    std::string text = minimal_config();
    text.replace(text.find("d3 = 0.03"), 9, "d3 = 0.50");
    const RunConfig cfg = parse_run_config(text);
    CHECK_FALSE(cfg.warnings.empty());

    std::string text2 = text;
    text2.replace(text2.find("[grid]"), 6, "allow_d3_ge_d2 = true\n[grid]");
    const RunConfig cfg2 = parse_run_config(text2);
    CHECK(cfg2.warnings.empty());
  }
}

TEST_CASE("plan parsing and validation") {
  std::string plan_text = minimal_config() + R"(
[sweep]
eps_list = 1e-2, 1e-3, 1e-4
out_dir = out
seed = 7

[acceptance]
min_slope = 0.45

[duality]
c_mr = 1.5
q0_prime = 1.2
)";
  const ExperimentPlan plan = parse_plan(plan_text);
  CHECK(plan.eps_list.size() == 3);
  CHECK(plan.seed == 7);
  CHECK(plan.thresholds.min_slope == doctest::Approx(0.45));
  CHECK(plan.duality);

  SUBCASE("non-decreasing eps list rejected") {
    std::string bad = plan_text;
    bad.replace(bad.find("eps_list = 1e-2, 1e-3, 1e-4"), 27, "eps_list = 1, 1, 1");
    CHECK_THROWS_AS(parse_plan(bad), ConfigError);
  }

  SUBCASE("fewer than 3 eps rejected") {
    std::string bad = plan_text;
    bad.replace(bad.find("eps_list = 1e-2, 1e-3, 1e-4"), 27, "eps_list = 1e-2, 1e-3");
    CHECK_THROWS_AS(parse_plan(bad), ConfigError);
  }
}

TEST_CASE("initial fields: manifold split and seeded noise") {
  const RunConfig cfg = parse_run_config(minimal_config());
  const InitialFields f = build_initial_fields(cfg.init, cfg.grid, cfg.prm);
  for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
    CHECK(f.ph[i] == phi(f.N[i], f.P[i], cfg.prm));
    CHECK(f.ps[i] + f.ph[i] == doctest::Approx(f.P[i]).epsilon(1e-15));
  }

  std::string with_noise = minimal_config();
  with_noise.replace(with_noise.find("P = 0.4"), 7,
                     "noise_amp = 0.01\nseed = 3\nP = 0.4");
  const RunConfig cfg2 = parse_run_config(with_noise);
  const InitialFields a = build_initial_fields(cfg2.init, cfg2.grid, cfg2.prm);
  const InitialFields b = build_initial_fields(cfg2.init, cfg2.grid, cfg2.prm);
  CHECK(a.N == b.N); // same seed, bit-identical
  CHECK(a.N != f.N); // noise actually applied
}

TEST_CASE("snapshot round-trips are bit-exact") {
  const std::string dir = temp_dir();
  const Grid g = Grid::line(17, 1.0);
  Parameters prm;
  prm.d2 = 1.0;
  prm.d3 = 0.5;

  SUBCASE("zero state") {
    FastState st;
    st.t = 0.25;
    st.N = make_field(g);
    st.ps = make_field(g);
    st.ph = make_field(g);
    write_fast_snapshot(dir + "/zero.csv", g, st, prm);
    SnapshotHeader h;
    const FastState back = read_fast_snapshot(dir + "/zero.csv", &h);
    CHECK(back.N == st.N);
    CHECK(back.ps == st.ps);
    CHECK(back.ph == st.ph);
    CHECK(h.t == st.t);
    CHECK(h.grid.same_as(g));
    CHECK(h.param_hash == parameter_hash(prm));
  }

  SUBCASE("random state, including awkward values") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    FastState st;
    st.t = 1.0 / 3.0;
    st.N = make_field(g);
    st.ps = make_field(g);
    st.ph = make_field(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      st.N[i] = std::ldexp(uni(rng), static_cast<int>(i) - 8);
      st.ps[i] = uni(rng) * 1e-17;
      st.ph[i] = uni(rng);
    }
    st.N[0] = 0.1 + 0.2; // classic non-representable decimal
    write_fast_snapshot(dir + "/rand.csv", g, st, prm);
    const FastState back = read_fast_snapshot(dir + "/rand.csv");
    CHECK(back.N == st.N);
    CHECK(back.ps == st.ps);
    CHECK(back.ph == st.ph);
  }

  SUBCASE("limit state round-trip") {
    LimitState st;
    st.t = 0.5;
    st.N = make_field(g, 0.3);
    st.P = make_field(g, 0.7);
    write_limit_snapshot(dir + "/lim.csv", g, st, prm);
    const LimitState back = read_limit_snapshot(dir + "/lim.csv");
    CHECK(back.N == st.N);
    CHECK(back.P == st.P);
  }

  SUBCASE("truncated file is a header-level error, no partial state") {
    FastState st;
    st.t = 0.0;
    st.N = make_field(g, 1.0);
    st.ps = make_field(g, 2.0);
    st.ph = make_field(g, 3.0);
    write_fast_snapshot(dir + "/full.csv", g, st, prm);
    const std::string full = slurp(dir + "/full.csv");
    {
      std::ofstream out(dir + "/trunc.csv", std::ios::binary);
      out << full.substr(0, full.size() / 2);
    }
    CHECK_THROWS_AS(read_fast_snapshot(dir + "/trunc.csv"), std::runtime_error);
    {
      std::ofstream out(dir + "/header_only.csv", std::ios::binary);
      out << "fastlim_snapshot,v1\nt,0\n";
    }
    CHECK_THROWS_AS(read_fast_snapshot(dir + "/header_only.csv"), std::runtime_error);
  }

  SUBCASE("field-set mismatch is rejected") {
    LimitState st;
    st.t = 0.5;
    st.N = make_field(g, 0.3);
    st.P = make_field(g, 0.7);
    write_limit_snapshot(dir + "/lim2.csv", g, st, prm);
    CHECK_THROWS_AS(read_fast_snapshot(dir + "/lim2.csv"), std::runtime_error);
  }
}

TEST_CASE("atomic writes leave no temporary behind") {
  const std::string dir = temp_dir();
  atomic_write_file(dir + "/x.csv", "a,b\n1,2\n");
  CHECK(fs::exists(dir + "/x.csv"));
  CHECK_FALSE(fs::exists(dir + "/x.csv.tmp"));
  CHECK(slurp(dir + "/x.csv") == "a,b\n1,2\n");
}

TEST_CASE("rate plot SVG") {
  RateReport rep;
  rep.samples = {{1e-2, 1e-1}, {1e-3, 3.1e-2}, {1e-4, 1e-2}};
  rep.used = {true, true, true};
  rep.slope = 0.5;
  rep.intercept = std::log(1e-1) - 0.5 * std::log(1e-2);
  rep.r_squared = 1.0;
  rep.fit_count = 3;

  const std::string svg = emit_rate_plot_svg(rep);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("slope 1/2") != std::string::npos);
  CHECK(svg.find("slope 1/6") != std::string::npos);
  CHECK(svg.find("href") == std::string::npos); // self-contained
  // deterministic output
  CHECK(emit_rate_plot_svg(rep) == svg);

  RateReport empty;
  CHECK_THROWS_AS(emit_rate_plot_svg(empty), std::invalid_argument);
}

TEST_CASE("time-series SVG rejects a single point") {
  CHECK_THROWS_AS(emit_timeseries_svg("x", {1.0}, {2.0}), std::invalid_argument);
  const std::string svg = emit_timeseries_svg("mass", {0.0, 1.0, 2.0}, {1.0, 0.5, 0.25});
  CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("rate plot golden file") {
  RateReport rep;
  rep.samples = {{1e-2, 2.511886431509580e-01},
                 {1e-3, 7.943282347242815e-02},
                 {1e-4, 2.511886431509580e-02},
                 {1e-5, 1.258925411794167e-02}};
  rep.used = {true, true, true, false};
  rep.slope = 0.5;
  rep.intercept = std::log(2.511886431509580e-01) - 0.5 * std::log(1e-2);
  rep.r_squared = 0.999;
  rep.plateau_detected = true;
  rep.fit_count = 3;

  const std::string got = emit_rate_plot_svg(rep);
  const std::string golden_path = std::string(FASTLIM_SOURCE_DIR) + "/tests/golden/rates.svg";
  if (!fs::exists(golden_path)) {
    // first run pins the golden file
    atomic_write_file(golden_path, got);
  }
  CHECK(got == slurp(golden_path));
}
