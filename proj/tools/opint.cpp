// opint: batch driver for identity checks, Besov norms, f(A,B) evaluation and
// Lipschitz experiments.
//
// Exit codes: 0 success, 2 validation error, 3 numerical capability error.

#include "opint/opint.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using opint::io::json;

namespace {

constexpr const char* kToolVersion = "0.3.0";

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = ".";
  int threads = 0;
  std::string format = "both";
};

class Outputs {
 public:
  Outputs(const Common& c, std::string command) : common_(c), command_(std::move(command)) {
    std::error_code ec;
    fs::create_directories(common_.out_dir, ec);
    if (ec || !fs::is_directory(common_.out_dir))
      throw opint::ValidationError("output directory '" + common_.out_dir + "' is not writable");
  }

  bool want_json() const { return common_.format == "json" || common_.format == "both"; }
  bool want_csv() const { return common_.format == "csv" || common_.format == "both"; }

  void write(const std::string& name, const std::string& bytes) {
    const fs::path path = fs::path(common_.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw opint::ValidationError("cannot write '" + path.string() + "'");
    out << bytes;
    out.close();
    files_.push_back({{"path", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
  }

  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  void manifest(std::uint64_t seed, double wall_time) {
    json m{{"command", command_},
           {"config_path", common_.config_path},
           {"output_dir", common_.out_dir},
           {"seed", seed},
           {"tool_version", kToolVersion},
           {"wall_time", wall_time},
           {"files", files_}};
    const fs::path path = fs::path(common_.out_dir) / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw opint::ValidationError("cannot write '" + path.string() + "'");
    out << m.dump(2) << "\n";
  }

 private:
  const Common& common_;
  std::string command_;
  json files_ = json::array();
};

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("OPINT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

json load_config(const Common& c) {
  if (c.config_path.empty()) return json::object();
  return opint::io::read_json_file(c.config_path);
}

void write_experiment(Outputs& out, const opint::ExperimentReport& rep, const std::string& stem) {
  if (out.want_json()) out.write_json(stem + ".json", opint::io::experiment_report_to_json(rep));
  if (out.want_csv()) {
    out.write(stem + ".csv", opint::io::experiment_report_to_csv(rep));
    const auto plot = opint::io::emit_plot_data(rep);
    out.write(stem + "_series.csv", plot.series);
    out.write(stem + "_summary.csv", plot.summary);
  }
}

void print_trends(const opint::ExperimentReport& rep) {
  std::cout << "empirical_constant " << opint::io::num(rep.empirical_constant) << " (" << rep.trials.size()
            << " trials, " << rep.skipped << " skipped)\n";
  for (const auto& t : rep.trends)
    std::cout << "p=" << opint::io::num(t.p) << " spread=" << opint::io::num(t.spread)
              << " growth=" << opint::io::num(t.growth_factor) << (t.grows ? " [grows]" : "") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for functions of noncommuting self-adjoint pairs"};
  app.require_subcommand(1);
  Common common;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON config file");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { common.seed = s, common.seed_set = true; }, "Master seed");
    sub->add_option("--out", common.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", common.threads, "Worker threads (default: $OPINT_THREADS or 1)");
    sub->add_option("--format", common.format, "Report format")
        ->check(CLI::IsMember({"json", "csv", "both"}))
        ->capture_default_str();
  };

  auto* verify = app.add_subcommand("verify-identity", "Check operator-difference identities on random instances");
  add_common(verify);
  std::string kind_flag;
  verify->add_option("--kind", kind_flag, "first|second|full|all (overrides config)");

  auto* besov = app.add_subcommand("besov", "Littlewood-Paley blocks and Besov norms of a catalog function");
  add_common(besov);
  std::string besov_fn;
  int sup_grid = opint::kDefaultSupGrid;
  besov->add_option("--function", besov_fn, "Function spec, e.g. plane_wave:2,0");
  besov->add_option("--grid", sup_grid, "Samples per axis for the sup-norm lower bound")->capture_default_str();

  auto* fab = app.add_subcommand("fab", "Evaluate f(A,B) for matrices in exchange format");
  add_common(fab);
  std::string a_path, b_path, f_spec;
  bool sharp = false;
  fab->add_option("--A", a_path, "Matrix document for A")->required();
  fab->add_option("--B", b_path, "Matrix document for B")->required();
  fab->add_option("--f", f_spec, "Function spec")->required();
  fab->add_flag("--sharp", sharp, "Evaluate through f_sharp(A,B)(I - iB)");

  auto* lip = app.add_subcommand("lipschitz", "Lipschitz ratio experiment for p in [1, 2]");
  add_common(lip);
  auto* scan = app.add_subcommand("scan", "Exploratory ratio scan for p > 2 (p = 2 as control)");
  add_common(scan);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();
  const int threads = resolve_threads(common.threads);
  std::string command = app.get_subcommands().front()->get_name();

  try {
    Outputs out(common, command);
    json cfg_doc = load_config(common);
    std::uint64_t seed = 0;

    if (command == "verify-identity") {
      if (!kind_flag.empty()) cfg_doc["kind"] = kind_flag;
      auto cfg = opint::io::identity_config_from_json(cfg_doc);
      if (common.seed_set) cfg.seed = common.seed;
      cfg.threads = threads;
      seed = cfg.seed;
      const auto rep = opint::run_identity_suite(cfg);
      if (out.want_json()) out.write_json("identity.json", opint::io::identity_report_to_json(rep, cfg));
      if (out.want_csv()) out.write("identity.csv", opint::io::identity_report_to_csv(rep));
      std::cout << "identity instances " << rep.rows.size() << ", max relative residual "
                << opint::io::num(rep.max_relative_residual) << "\n";
    } else if (command == "besov") {
      if (besov_fn.empty() && !cfg_doc.contains("function"))
        throw opint::ValidationError("besov: pass --function or a config with 'function'");
      const auto f = besov_fn.empty() ? opint::io::function_from_json(cfg_doc.at("function"))
                                      : opint::parse_function_spec(besov_fn);
      opint::BesovOptions opts;
      opts.sup_grid = opint::io::optional_field<int>(cfg_doc, "grid", sup_grid);
      const auto rep = opint::besov_report(f, opts);
      if (out.want_json()) out.write_json("besov.json", opint::io::besov_report_to_json(rep));
      if (out.want_csv()) out.write("besov.csv", opint::io::besov_report_to_csv(rep));
      std::cout << "inhomogeneous [" << opint::io::num(rep.inhomogeneous_norm.lower) << ", "
                << opint::io::num(rep.inhomogeneous_norm.upper) << "]\n";
      if (rep.homogeneous_norm)
        std::cout << "homogeneous [" << opint::io::num(rep.homogeneous_norm->lower) << ", "
                  << opint::io::num(rep.homogeneous_norm->upper) << "]\n";
    } else if (command == "fab") {
      const opint::HermitianMatrix a(opint::io::matrix_from_json(opint::io::read_json_file(a_path)));
      const opint::HermitianMatrix b(opint::io::matrix_from_json(opint::io::read_json_file(b_path)));
      const auto f = opint::parse_function_spec(f_spec);
      const opint::Matrix v = sharp ? opint::f_of_pair_sharp(f, a, b) : opint::f_of_pair(f, a, b);
      if (out.want_json()) out.write_json("fab.json", opint::io::matrix_to_json(v));
      if (out.want_csv()) {
        std::ostringstream os;
        os << "row,col,re,im\n";
        for (Eigen::Index r = 0; r < v.rows(); ++r)
          for (Eigen::Index c = 0; c < v.cols(); ++c)
            os << r << ',' << c << ',' << opint::io::num(v(r, c).real()) << ',' << opint::io::num(v(r, c).imag())
               << '\n';
        out.write("fab.csv", os.str());
      }
    } else {
      auto cfg = opint::io::lipschitz_config_from_json(cfg_doc);
      if (common.seed_set) cfg.seed = common.seed;
      cfg.threads = threads;
      seed = cfg.seed;
      const bool is_scan = command == "scan";
      if (is_scan && !cfg_doc.contains("p")) cfg.ps = {opint::SchattenIndex(2.0), opint::SchattenIndex::infinity()};
      const auto rep = is_scan ? opint::p_above_2_scan(cfg) : opint::lipschitz_experiment(cfg);
      write_experiment(out, rep, is_scan ? "scan" : "lipschitz");
      print_trends(rep);
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.manifest(seed, wall);
    return 0;
  } catch (const opint::ValidationError& e) {
    std::cerr << "opint " << command << ": validation error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "opint " << command << ": validation error: malformed document: " << e.what() << "\n";
    return 2;
  } catch (const opint::CapabilityError& e) {
    std::cerr << "opint " << command << ": capability error: " << e.what() << "\n";
    return 3;
  } catch (const opint::NumericalError& e) {
    std::cerr << "opint " << command << ": numerical error: " << e.what() << "\n";
    return 3;
  }
}
