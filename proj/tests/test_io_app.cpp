#include "gen.hpp"
#include "riesz/app.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <bit>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace riesz;
using riesz::testing::Gen;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "riesz_io_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

RunConfig energy_run(const std::string& f, int dim = 1) {
  RunConfig rc;
  rc.command = "energy";
  rc.dim = dim;
  rc.f = f;
  return rc;
}

}  // namespace

TEST(Format, DoublesRoundTripBitForBit) {
  Gen gen(1);
  std::mt19937_64 bits(2);
  for (int k = 0; k < 20000; ++k) {
    double v = std::bit_cast<double>(bits());
    if (!std::isfinite(v)) v = gen.uniform(-1e6, 1e6);
    const double back = parse_double(format_double(v));
    EXPECT_EQ(v == 0 ? 0.0 : v, back);
    if (v != 0) EXPECT_EQ(std::bit_cast<std::uint64_t>(v), std::bit_cast<std::uint64_t>(back));
  }
  EXPECT_EQ(format_double(kInf), "inf");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(parse_double("+inf"), kInf);
  EXPECT_EQ(code_of([] { parse_double("1.5x"); }), ErrorCode::FormatError);
  EXPECT_EQ(code_of([] { parse_double(""); }), ErrorCode::FormatError);
}

TEST(GridFile, RoundTrip) {
  Gen gen(3);
  for (int dim : {1, 2}) {
    GridFunction phi = gen.convex(GridSpec::cube(dim, 1.5, dim == 1 ? 33 : 9));
    Eigen::ArrayXd v = phi.values();
    v(0) = kInf;
    phi = GridFunction(phi.spec(), v);
    std::stringstream ss;
    write_grid(ss, phi);
    const GridFunction back = read_grid(ss);
    EXPECT_TRUE(back.spec() == phi.spec());
    for (Index k = 0; k < phi.size(); ++k) EXPECT_EQ(back(k), phi(k));
  }
}

TEST(GridFile, MalformedInputIsAFormatError) {
  for (const char* text : {"", "3 5 0 1\n", "1 4 0 1\n0\n0\n0\n0\n", "1 3 0 1\n0\n1\n", "1 3 0 1\n0\n1\n2\n3\n",
                           "1 3 0 1\n0\nx\n1\n", "1 3 1 0\n0\n0\n0\n"}) {
    std::stringstream ss(text);
    EXPECT_EQ(code_of([&] { read_grid(ss); }), ErrorCode::FormatError) << text;
  }
}

TEST(MeasureFile, RoundTrip) {
  Gen gen(4);
  const DiscreteMeasure mu(Ambient::Euclidean, 2, gen.atoms(2, 17, 3));
  std::stringstream ss;
  write_measure(ss, mu);
  const DiscreteMeasure back = read_measure(ss);
  ASSERT_EQ(back.size(), mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    EXPECT_EQ(back.atoms()[i].x, mu.atoms()[i].x);
    EXPECT_EQ(back.atoms()[i].w, mu.atoms()[i].w);
  }
  std::stringstream bad("measure plane 1\n1 1\n");
  EXPECT_EQ(code_of([&] { read_measure(bad); }), ErrorCode::FormatError);
  std::stringstream neg("measure euclidean 1\n1 -1\n");
  EXPECT_EQ(code_of([&] { read_measure(neg); }), ErrorCode::FormatError);
}

TEST(SupportFile, RoundTrip) {
  for (const auto& k : {SupportSet::interval(-1, 2.5), SupportSet::regular_polygon(6, 1.5), SupportSet::whole(2)}) {
    std::stringstream ss;
    write_support(ss, k);
    const SupportSet back = read_support(ss);
    EXPECT_EQ(back.kind(), k.kind());
    if (k.bounded()) EXPECT_LE(back.hausdorff(k), 1e-15);
  }
}

TEST(FunctionRecord, ParsesEveryKind) {
  EXPECT_NEAR(parse_function("gaussian 2", 1).total_mass(), std::sqrt(kPi), 1e-12);
  EXPECT_NEAR(parse_function("exponential 1 1", 1).total_mass(), 2 * std::exp(1.0), 1e-12);
  EXPECT_NEAR(parse_function("indicator [-1,2] 3", 1).total_mass(), 9, 1e-12);
  EXPECT_NEAR(parse_function("indicator [-1,1]x[0,2]", 2).total_mass(), 4, 1e-12);
  const auto path = scratch("q.grid");
  save_grid(path.string(), GridFunction::sample(GridSpec::line(-6, 6, 241), [](const Point& x) { return x(0) * x(0) / 2; }));
  EXPECT_NEAR(parse_function("grid " + path.string(), 1).total_mass(), std::sqrt(2 * kPi), 1e-4);
  EXPECT_NEAR(parse_function("q.grid", 1, path.parent_path().string()).total_mass(), std::sqrt(2 * kPi), 1e-4);
  for (const char* bad : {"", "gaussian", "gaussian -1", "indicator [1,0]", "indicator [-1,1]x[0,1]", "cauchy 1"})
    EXPECT_EQ(code_of([&] { parse_function(bad, 1); }), ErrorCode::FormatError) << bad;
}

TEST(FunctionRecord, InverseOfParse) {
  const auto side = scratch("side.txt").string();
  for (const auto& f : {LogConcave::gaussian(1, 0.5, 0.25), LogConcave::exponential(2, 3),
                        LogConcave::indicator(SupportSet::interval(-1, 2), 2),
                        LogConcave::indicator(SupportSet::regular_polygon(5, 1))}) {
    const auto back = parse_function(function_record(f, side), f.dim());
    EXPECT_NEAR(back.total_mass(), f.total_mass(), 1e-12 * f.total_mass()) << f.describe();
  }
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig rc;
  rc.command = "variation";
  rc.alpha = 1.5;
  rc.dim = 2;
  rc.routes = {"closed", "fd"};
  rc.beta1 = 2;
  rc.tau = 3.25;
  rc.epsilon = {0.1, 0.01};
  const RunConfig back = RunConfig::from_json(rc.to_json());
  EXPECT_EQ(back.to_json(), rc.to_json());
  EXPECT_EQ(code_of([] { RunConfig::from_json("[1, 2]"); }), ErrorCode::FormatError);
  EXPECT_EQ(code_of([] { RunConfig::from_json("{"); }), ErrorCode::FormatError);
}

TEST(Report, TextAndJsonCarryTheSameEntries) {
  Report r;
  r.value("energy", 4.0, 1e-3);
  r.value("mass", 2.0);
  r.count("atoms", 3);
  r.flag("active", true);
  r.text("f", "gaussian");
  EXPECT_EQ(r.to_text(), "energy=4\nenergy_error=0.001\nmass=2\nmass_error=exact\natoms=3\nactive=true\nf=gaussian\n");
  const auto j = nlohmann::ordered_json::parse(r.to_json());
  EXPECT_EQ(j["energy"], 4.0);
  EXPECT_EQ(j["mass_error"], "exact");
  EXPECT_EQ(j.begin().key(), "energy");
}

TEST(Execute, EnergyReportAndExitCodes) {
  const Outcome ok = execute(energy_run("indicator [-1,1]"));
  EXPECT_EQ(ok.code, kExitOk);
  EXPECT_NE(ok.report.to_text().find("energy=4"), std::string::npos);

  RunConfig bad_alpha = energy_run("gaussian 1");
  bad_alpha.alpha = -1;
  EXPECT_EQ(execute(bad_alpha).code, kExitInvalidAlpha);
  EXPECT_EQ(execute(energy_run("gaussian x")).code, kExitFormat);
  EXPECT_EQ(execute(energy_run("nowhere.grid")).code, kExitFormat);
  RunConfig unknown;
  unknown.command = "frobnicate";
  EXPECT_NE(execute(unknown).code, kExitOk);
}

TEST(Execute, DualGridTooSmall) {
  // x^2 on [-2, 2] has boundary slopes +-4; beyond them the sup sits on the
  // box edge, where the data is curved.
  const auto path = scratch("quad.grid").string();
  save_grid(path, GridFunction::sample(GridSpec::line(-2, 2, 101), [](const Point& x) { return x(0) * x(0); }));
  RunConfig rc;
  rc.command = "conjugate";
  rc.input = path;
  rc.output = scratch("quad_conj.grid").string();
  rc.dual_half = 8;
  EXPECT_EQ(execute(rc).code, kExitDualGridTooSmall);
  rc.dual_half = 2;
  ASSERT_EQ(execute(rc).code, kExitOk);
  const GridFunction conj = load_grid(rc.output);
  EXPECT_EQ(conj.at(conj.spec().nodes[0] / 2), 0);
  EXPECT_NEAR(conj.at(conj.spec().nodes[0] - 1), 1, 1e-3);
}

TEST(Execute, AdmissibilityGate) {
  const auto conc = scratch("conc.measure").string(), empty = scratch("empty.measure").string();
  save_measure(conc, DiscreteMeasure(Ambient::Euclidean, 2, {{make_point(1, 0), 1}, {make_point(-1, 0), 1}}));
  std::ofstream(empty) << "measure euclidean 1\n";
  for (const std::string cmd : {"admissibility", "solve"})
    for (const auto& [file, dim] : {std::pair{conc, 2}, std::pair{empty, 1}}) {
      RunConfig rc;
      rc.command = cmd;
      rc.mu = file;
      rc.dim = dim;
      rc.output = scratch("out").string();
      EXPECT_EQ(execute(rc).code, kExitInadmissible) << cmd << ' ' << file;
    }
}

TEST(Execute, VariationRoutesAgree) {
  RunConfig rc;
  rc.command = "variation";
  rc.f = "gaussian 1";
  rc.routes = {"closed", "boundary", "general", "fd"};
  const Outcome o = execute(rc);
  EXPECT_EQ(o.code, kExitOk) << o.report.to_text();
}

TEST(Execute, ByteIdenticalAcrossThreadCounts) {
  for (RunConfig rc : {energy_run("gaussian 1", 2), energy_run("exponential 1")}) {
    std::string ref;
    for (int t : {1, 2, 4}) {
      rc.threads = t;
      const std::string text = execute(rc).report.to_text();
      if (t == 1) ref = text;
      EXPECT_EQ(text, ref) << t << " threads";
    }
  }
}

TEST(Execute, PlotdataFromMeasure) {
  RunConfig rc;
  rc.command = "measure";
  rc.f = "gaussian 1";
  rc.output = scratch("g.measure").string();
  ASSERT_EQ(execute(rc).code, kExitOk);
  RunConfig plot;
  plot.command = "plotdata";
  plot.input = rc.output;
  const Outcome o = execute(plot);
  ASSERT_EQ(o.code, kExitOk);
  EXPECT_EQ(o.csv.substr(0, o.csv.find('\n')).empty(), false);
}
