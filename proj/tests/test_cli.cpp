#include "commands.hpp"
#include "io.hpp"

#include "ridgekit/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

using namespace ridgekit;
using namespace ridgekit::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result ridgekit_run(std::vector<std::string> args) {
  args.insert(args.begin(), "ridgekit");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class Scratch {
 public:
  Scratch() {
    static int counter = 0;
    dir_ = fs::temp_directory_path() / ("ridgekit_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  std::string operator/(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::size_t line_count(const std::string& path) {
  const std::string text = slurp(path);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("sample") {
  Scratch tmp;
  SUBCASE("Latin property and determinism") {
    REQUIRE(ridgekit_run({"sample", "--design", "lhs", "--count", "4", "--dim", "1", "--seed", "7", "--out", tmp / "a.csv"}).code == 0);
    REQUIRE(ridgekit_run({"sample", "--design", "lhs", "--count", "4", "--dim", "1", "--seed", "7", "--out", tmp / "b.csv"}).code == 0);
    CHECK(slurp(tmp / "a.csv") == slurp(tmp / "b.csv"));
    const Table t = read_csv(tmp / "a.csv");
    CHECK(t.header == std::vector<std::string>{"x1"});
    REQUIRE(t.values.rows() == 4);
    std::vector<int> strata;
    for (Eigen::Index i = 0; i < 4; ++i) strata.push_back(static_cast<int>(std::floor(t.values(i, 0) * 4.0)));
    std::sort(strata.begin(), strata.end());
    CHECK(strata == std::vector<int>{0, 1, 2, 3});
  }
  SUBCASE("box bounds") {
    REQUIRE(ridgekit_run({"sample", "--count", "50", "--dim", "3", "--lo", "-0.01", "--hi", "0.01", "--out", tmp / "box.csv"}).code == 0);
    const Table t = read_csv(tmp / "box.csv");
    CHECK(t.values.minCoeff() >= -0.01);
    CHECK(t.values.maxCoeff() <= 0.01);
  }
  SUBCASE("function column round-trips at full precision") {
    REQUIRE(ridgekit_run({"sample", "--design", "gaussian", "--count", "20", "--dim", "2", "--function", "bivariate",
                          "--grads-out", tmp / "g.csv", "--out", tmp / "s.csv"}).code == 0);
    const Table t = read_csv(tmp / "s.csv");
    const Matrix x = t.numbered("x");
    CHECK(t.values.col(t.column("f")) == bivariate().values(x));
    CHECK(read_csv(tmp / "g.csv").numbered("g") == bivariate().gradients(x));
  }
  CHECK(ridgekit_run({"sample", "--count", "4", "--dim", "2", "--out", "/nonexistent-dir/x.csv"}).code == kIoError);
  CHECK(ridgekit_run({"sample", "--dim", "2", "--function", "nope", "--out", tmp / "x.csv"}).code == kUnsupported);
}

TEST_CASE("subspace") {
  Scratch tmp;
  SUBCASE("linear function") {
    std::ofstream(tmp / "g.csv") << "g1,g2,g3\n1,2,2\n1,2,2\n1,2,2\n";
    REQUIRE(ridgekit_run({"subspace", "--grads", tmp / "g.csv", "--out", tmp / "sp.json"}).code == 0);
    const Json doc = read_json(tmp / "sp.json");
    CHECK(doc["eigenvalues"][0].get<double>() == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(std::abs(doc["eigenvalues"][1].get<double>()) <= 1e-13);
    CHECK(doc["suggested_n"].get<int>() == 1);
    CHECK(doc["bootstrap"]["B"].get<int>() == static_cast<int>(kDefaultBootstrapReplicates));
  }
  SUBCASE("single row is rank one") {
    std::ofstream(tmp / "g.csv") << "g1,g2\n3,4\n";
    REQUIRE(ridgekit_run({"subspace", "--grads", tmp / "g.csv", "--bootstrap", "0", "--out", tmp / "sp.json"}).code == 0);
    const SpectrumFile sp = spectrum_from_json(read_json(tmp / "sp.json"));
    CHECK(sp.spectrum.eigenvalues(0) == doctest::Approx(25.0).epsilon(1e-14));
    CHECK(std::abs(sp.spectrum.eigenvalues(1)) <= 1e-13);
  }
  SUBCASE("bivariate gradients point along e2") {
    REQUIRE(ridgekit_run({"sample", "--design", "gaussian", "--count", "1000", "--dim", "2", "--function", "bivariate",
                          "--grads-out", tmp / "g.csv", "--seed", "3", "--out", tmp / "s.csv"}).code == 0);
    REQUIRE(ridgekit_run({"subspace", "--grads", tmp / "g.csv", "--seed", "1", "--out", tmp / "sp.json"}).code == 0);
    const SpectrumFile sp = spectrum_from_json(read_json(tmp / "sp.json"));
    Matrix e2(2, 1);
    e2 << 0, 1;
    CHECK(subspace_distance(sp.spectrum.leading(1).matrix(), e2) <= 0.05);
    // Reruns are byte-identical.
    REQUIRE(ridgekit_run({"subspace", "--grads", tmp / "g.csv", "--seed", "1", "--out", tmp / "sp2.json"}).code == 0);
    CHECK(slurp(tmp / "sp.json") == slurp(tmp / "sp2.json"));
  }
  SUBCASE("no spectral gap") {
    std::ofstream(tmp / "g.csv") << "g1,g2\n1,0\n0,1\n";
    const Result r = ridgekit_run({"subspace", "--grads", tmp / "g.csv", "--out", tmp / "sp.json"});
    CHECK(r.code == 0);
    const Json doc = read_json(tmp / "sp.json");
    CHECK(doc["suggested_n"].is_null());
    CHECK(doc.contains("warning"));
  }
  SUBCASE("malformed CSV reports the line") {
    std::ofstream(tmp / "g.csv") << "g1,g2\n1,2\n3,oops\n";
    const Result r = ridgekit_run({"subspace", "--grads", tmp / "g.csv", "--out", tmp / "sp.json"});
    CHECK(r.code == kParseError);
    CHECK(r.err.find(":3:") != std::string::npos);
  }
}

struct HistoryRow {
  int iter;
  std::string phase;
  double residual;
};

std::vector<HistoryRow> read_history(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "iter,phase,residual");
  std::vector<HistoryRow> rows;
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    rows.push_back({std::stoi(line.substr(0, a)), line.substr(a + 1, b - a - 1), std::stod(line.substr(b + 1))});
  }
  return rows;
}

TEST_CASE("fit, predict, testerror and shadow") {
  Scratch tmp;
  REQUIRE(ridgekit_run({"sample", "--design", "gaussian", "--count", "200", "--dim", "4", "--function", "exact_ridge",
                        "--params", "4,1,6", "--grads-out", tmp / "g.csv", "--seed", "5", "--out", tmp / "s.csv"}).code == 0);
  REQUIRE(ridgekit_run({"subspace", "--grads", tmp / "g.csv", "--out", tmp / "sp.json"}).code == 0);
  const Table data = read_csv(tmp / "s.csv");
  const Vector f = data.values.col(data.column("f"));

  const std::vector<std::string> fit_args{"fit", "--samples", tmp / "s.csv", "--dim", "1", "--degree", "3", "--init",
                                          "active", "--spectrum", tmp / "sp.json", "--history", tmp / "h.csv",
                                          "--out", tmp / "m.json"};
  REQUIRE(ridgekit_run(fit_args).code == 0);
  const Json model = read_json(tmp / "m.json");
  CHECK(model["version"] == kModelVersion);
  CHECK(model["init"] == "active");
  CHECK(model["residual_final"].get<double>() <= 1e-8 * f.squaredNorm());

  SUBCASE("history is nonincreasing and complete") {
    const std::vector<HistoryRow> h = read_history(tmp / "h.csv");
    CHECK(h.size() == 2 * kDefaultIterations + 1);
    CHECK(h.front().phase == "theta");
    CHECK(h.back().phase == "theta");
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i].residual <= h[i - 1].residual + 1e-12);
  }
  SUBCASE("P = 0 writes one theta row") {
    REQUIRE(ridgekit_run({"fit", "--samples", tmp / "s.csv", "--iters", "0", "--init", "identity", "--history",
                          tmp / "h0.csv", "--out", tmp / "m0.json"}).code == 0);
    const std::vector<HistoryRow> h = read_history(tmp / "h0.csv");
    REQUIRE(h.size() == 1);
    CHECK(h[0].phase == "theta");
  }
  SUBCASE("reruns are byte-identical") {
    REQUIRE(ridgekit_run({"fit", "--samples", tmp / "s.csv", "--init", "random", "--seed", "4", "--out", tmp / "r1.json"}).code == 0);
    REQUIRE(ridgekit_run({"fit", "--samples", tmp / "s.csv", "--init", "random", "--seed", "4", "--out", tmp / "r2.json"}).code == 0);
    CHECK(slurp(tmp / "r1.json") == slurp(tmp / "r2.json"));
  }
  SUBCASE("missing spectrum for active init") {
    CHECK(ridgekit_run({"fit", "--samples", tmp / "s.csv", "--init", "active", "--out", tmp / "x.json"}).code ==
          kMissingInput);
  }
  SUBCASE("predict reproduces training data in order") {
    REQUIRE(ridgekit_run({"predict", "--model", tmp / "m.json", "--samples", tmp / "s.csv", "--out", tmp / "p.csv"}).code == 0);
    const Table p = read_csv(tmp / "p.csv");
    CHECK(p.header == std::vector<std::string>{"fhat"});
    CHECK((p.values.col(0) - f).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, f.cwiseAbs().maxCoeff()));
  }
  SUBCASE("testerror") {
    const Result perfect = ridgekit_run({"testerror", "--model", tmp / "m.json", "--samples", tmp / "s.csv"});
    REQUIRE(perfect.code == 0);
    CHECK(Json::parse(perfect.out)["mean_relative_error"].get<double>() <= 1e-9);

    // Labels at half the prediction: fhat = 2 f.
    const RidgeModel m = model_from_json(model);
    const Matrix x = data.numbered("x");
    Matrix half(x.rows(), x.cols() + 1);
    half << x, 0.5 * m.predict(x);
    std::vector<std::string> header = numbered_header("x", x.cols());
    header.push_back("f");
    write_text(tmp / "half.csv", csv_text(header, half));
    const Result doubled = ridgekit_run({"testerror", "--model", tmp / "m.json", "--samples", tmp / "half.csv"});
    REQUIRE(doubled.code == 0);
    CHECK(Json::parse(doubled.out)["mean_relative_error"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("dimension mismatch") {
    REQUIRE(ridgekit_run({"sample", "--count", "3", "--dim", "2", "--out", tmp / "x2.csv"}).code == 0);
    CHECK(ridgekit_run({"predict", "--model", tmp / "m.json", "--samples", tmp / "x2.csv", "--out", tmp / "p.csv"}).code ==
          kDimensionMismatch);
    CHECK(ridgekit_run({"testerror", "--model", tmp / "m.json", "--samples", tmp / "x2.csv"}).code == kDimensionMismatch);
  }
  SUBCASE("shadow n = 1") {
    REQUIRE(ridgekit_run({"shadow", "--model", tmp / "m.json", "--samples", tmp / "s.csv", "--out", tmp / "sh.csv"}).code == 0);
    CHECK(line_count(tmp / "sh.csv") == 1 + 200 + 200);
    std::ifstream in(tmp / "sh.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "kind,y,f");
    const RidgeModel m = model_from_json(model);
    std::size_t samples = 0;
    while (std::getline(in, line)) {
      const auto a = line.find(',');
      const auto b = line.find(',', a + 1);
      const double y = std::stod(line.substr(a + 1, b - a - 1));
      const double v = std::stod(line.substr(b + 1));
      // Every row, scatter or curve, lies on p for an exact fit.
      const double p = m.poly.evaluate(Matrix::Constant(1, 1, y))(0);
      CHECK(std::abs(p - v) <= 1e-9 * std::max(1.0, std::abs(v)));
      if (line.rfind("sample", 0) == 0) ++samples;
    }
    CHECK(samples == 200);
  }
  SUBCASE("shadow n = 2 and n = 3") {
    REQUIRE(ridgekit_run({"fit", "--samples", tmp / "s.csv", "--dim", "2", "--iters", "1", "--init", "identity", "--out",
                          tmp / "m2.json"}).code == 0);
    REQUIRE(ridgekit_run({"shadow", "--model", tmp / "m2.json", "--samples", tmp / "s.csv", "--out", tmp / "sh2.csv"}).code == 0);
    CHECK(line_count(tmp / "sh2.csv") == 1 + 200 + 2500);
    REQUIRE(ridgekit_run({"fit", "--samples", tmp / "s.csv", "--dim", "3", "--iters", "1", "--init", "identity", "--out",
                          tmp / "m3.json"}).code == 0);
    const Result r = ridgekit_run({"shadow", "--model", tmp / "m3.json", "--samples", tmp / "s.csv", "--out", tmp / "sh3.csv"});
    CHECK(r.code == kUnsupported);
    CHECK(r.err.find("shadow plots require n <= 2") != std::string::npos);
  }
}

TEST_CASE("sweep") {
  Scratch tmp;
  REQUIRE(ridgekit_run({"sweep", "--angles", "3", "--out", tmp / "sw.csv"}).code == 0);
  const Table t = read_csv(tmp / "sw.csv");
  CHECK(t.header == std::vector<std::string>{"alpha", "R"});
  REQUIRE(t.values.rows() == 3);
  CHECK(t.values(0, 0) == 0.0);
  CHECK(t.values(1, 0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
  CHECK(std::abs(t.values(0, 1) - 0.25) <= 5e-4);
  CHECK(std::abs(t.values(1, 1) - 12.5) <= 5e-3);
  CHECK(t.values.col(1).minCoeff() >= 0.0);
}

TEST_CASE("checkbound") {
  auto report = [](std::vector<std::string> args) {
    args.insert(args.begin(), "checkbound");
    const Result r = ridgekit_run(args);
    REQUIRE(r.code == 0);
    return Json::parse(r.out);
  };
  const Json bv = report({"--function", "bivariate", "--quad-outer", "151"});
  CHECK(bv["ok"].get<bool>());

  const Json ridge = report({"--function", "exact_ridge", "--params", "3,1,2", "--quad-outer", "9"});
  CHECK(ridge["ok"].get<bool>());
  CHECK(ridge["gradient_norm"].get<double>() <= 1e-6);
  CHECK(ridge["bound"].get<double>() <= 1e-6);

  const Json quad = report({"--function", "quadratic", "--params", "3,1", "--quad-outer", "6"});
  CHECK(quad["ok"].get<bool>());
  CHECK(quad["eigenvalues"][1].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(ridgekit_run({"checkbound", "--function", "sphere", "--params", "4"}).code == kUnsupported);
}

TEST_CASE("usage errors and the real binary's exit status") {
  CHECK(ridgekit_run({}).code == kParseError);
  CHECK(ridgekit_run({"fit"}).code == kParseError);
  CHECK(ridgekit_run({"fit", "--samples", "a.csv", "--out", "m.json", "--init", "sideways"}).code == kParseError);
  CHECK(ridgekit_run({"--help"}).code == 0);

  Scratch tmp;
  const std::string tool = RIDGEKIT_TOOL_PATH;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(tool + " sample --count 5 --dim 2 --out " + (tmp / "x.csv")) == 0);
  CHECK(status(tool + " predict --model " + (tmp / "missing.json") + " --samples " + (tmp / "x.csv") + " --out " +
               (tmp / "p.csv")) == kIoError);
  CHECK(status(tool + " sample --dim") == kParseError);
}
