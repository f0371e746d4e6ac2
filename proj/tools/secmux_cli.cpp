// secmux: desk-scale toolbox for multiplexed confidential coding.
//
// Subcommands: hash verify, pa check, psi, phi, region scan, region member,
// exponent, simulate. Every command is deterministic given (config, seed) and
// writes output files atomically. Exit codes: 0 pass, 1 property failure,
// 2 input error, 3 resource-guard violation.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "secmux/json_io.hpp"
#include "secmux/secmux.hpp"

namespace {

using secmux::json;

struct GlobalOptions {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool bits = false;
};

json load_config(const GlobalOptions& opts) {
  std::ifstream in(opts.config_path);
  if (!in) throw std::invalid_argument("cannot open config file " + opts.config_path);
  return json::parse(in);
}

secmux::Guards guards_from_env() {
  secmux::Guards guards;
  if (const char* raw = std::getenv("SECMUX_GUARD_OVERRIDE")) {
    const double factor = std::stod(raw);
    if (factor < 1.0) throw std::invalid_argument("SECMUX_GUARD_OVERRIDE must be >= 1");
    guards = guards.scaled(factor);
  }
  return guards;
}

// Keys whose values are rates/informations in nats; --bits divides them by ln 2.
bool is_nats_key(const std::string& key) {
  static const char* keys[] = {
      "mi",          "mi_given_common", "equivocation",       "equivocation_rate",
      "message_entropy", "r_i",         "r_p",                "r_common",
      "r_secret",    "i_vz_u",          "i_uy",               "i_uz",
      "i_vy_u",      "value",           "best_value",         "average_leakage",
      "leakage_thresholds", "equivocation_bound", "phi_term", "eps_rho",
      "rate_gap",    "slack",           "psi",                "phi",
      "r0_max",      "rsum_max",        "re_max",             "best_re",
      "best_rsum"};
  for (const char* k : keys) {
    if (key == k) return true;
  }
  return false;
}

void convert_to_bits(json& j) {
  const double ln2 = std::log(2.0);
  if (j.is_object()) {
    for (auto& item : j.items()) {
      if (is_nats_key(item.key())) {
        if (item.value().is_number()) {
          item.value() = item.value().get<double>() / ln2;
        } else if (item.value().is_array()) {
          for (auto& v : item.value()) {
            if (v.is_number()) v = v.get<double>() / ln2;
          }
        }
      } else {
        convert_to_bits(item.value());
      }
    }
  } else if (j.is_array()) {
    for (auto& v : j) convert_to_bits(v);
  }
}

void emit(const GlobalOptions& opts, json report, const std::string& csv) {
  std::string payload;
  if (opts.format == "csv") {
    payload = csv;
  } else {
    if (opts.bits) {
      report["units"] = "bits";
      convert_to_bits(report);
    } else {
      report["units"] = "nats";
    }
    payload = report.dump(2) + "\n";
  }
  if (opts.out_path.empty()) {
    std::cout << payload;
  } else {
    secmux::write_atomic(opts.out_path, payload);
  }
}

double display(double nats, const GlobalOptions& opts) {
  return opts.bits ? nats / std::log(2.0) : nats;
}

int cmd_hash_verify(const GlobalOptions& opts) {
  const json cfg = load_config(opts);
  secmux::check_keys(cfg, {"family", "subsets", "include_randomness_factor"}, "hash verify");
  const secmux::HashFamily family = secmux::family_from_json(cfg.at("family"));
  const secmux::Guards guards = guards_from_env();
  const auto& layout = family.layout();

  std::vector<secmux::Subset> subsets;
  if (cfg.contains("subsets")) {
    for (const auto& s : cfg.at("subsets")) subsets.push_back(s.get<secmux::Subset>());
  } else {
    const bool with_randomness = cfg.value("include_randomness_factor", true);
    subsets = secmux::all_nonempty_subsets(with_randomness ? layout.num_factors()
                                                           : layout.num_secrets());
  }

  bool all_pass = true;
  json rows = json::array();
  std::ostringstream csv;
  csv << "subset,max_ratio,max_ratio_value,bound,bound_value,pass,members,orbit_pass\n";
  for (const auto& subset : subsets) {
    secmux::validate_subset(layout, subset, true);
    const auto report = secmux::verify_two_universal(family, subset, guards, opts.threads);
    json row = secmux::two_universal_report_to_json(report);
    row["subset"] = secmux::subset_label(subset);
    std::string orbit_cell = "";
    if (family.kind() == secmux::FamilyKind::bijective_linear) {
      // worst orbit ratio over every nonzero vector
      bool orbit_pass = true;
      secmux::Rational worst(0, 1);
      for (std::uint64_t v = 1; v < layout.space_size(); ++v) {
        const auto orb = secmux::orbit_criterion(family, subset, layout.vector_of(v), guards);
        if (!orb.pass) orbit_pass = false;
        if (orb.ratio > worst) worst = orb.ratio;
      }
      row["orbit_pass"] = orbit_pass;
      row["orbit_worst_ratio"] = worst.str();
      orbit_cell = orbit_pass ? "1" : "0";
    }
    all_pass = all_pass && report.pass;
    rows.push_back(row);
    csv << secmux::subset_label(subset) << ',' << report.max_ratio.str() << ','
        << secmux::format_sig(report.max_ratio.value()) << ',' << report.bound.str() << ','
        << secmux::format_sig(report.bound.value()) << ',' << (report.pass ? 1 : 0) << ','
        << report.member_count << ',' << orbit_cell << '\n';
  }
  emit(opts, json{{"pass", all_pass}, {"reports", rows}}, csv.str());
  return all_pass ? 0 : 1;
}

int cmd_pa_check(const GlobalOptions& opts) {
  const json cfg = load_config(opts);
  secmux::check_keys(
      cfg, {"family", "eve", "prior", "rho", "subsets", "tolerance", "channels", "verbose"},
      "pa check");
  const bool verbose = cfg.value("verbose", false);
  secmux::ChannelTable table;
  if (cfg.contains("channels")) table = secmux::channel_table_from_json(cfg.at("channels"));
  const secmux::HashFamily family = secmux::family_from_json(cfg.at("family"));
  const auto& layout = family.layout();
  const secmux::Channel eve = secmux::channel_from_json(cfg.at("eve"), table);
  const secmux::Distribution prior =
      cfg.contains("prior") ? secmux::distribution_from_json(cfg.at("prior"))
                            : secmux::Distribution::uniform(
                                  static_cast<std::size_t>(layout.space_size()));
  const auto rhos = cfg.at("rho").get<std::vector<double>>();
  const double tol = cfg.value("tolerance", secmux::kDerivedTol);
  const secmux::Guards guards = guards_from_env();

  std::vector<secmux::Subset> subsets;
  if (cfg.contains("subsets")) {
    for (const auto& s : cfg.at("subsets")) subsets.push_back(s.get<secmux::Subset>());
  } else {
    subsets = secmux::all_nonempty_subsets(layout.num_factors());
  }

  const secmux::Joint lz = secmux::Joint::from_prior_and_channel(prior, eve);
  bool all_pass = true;
  json rows = json::array();
  std::ostringstream csv;
  csv << "rho,subset,lhs,rhs,rhs_uniform,rhs_discrete,margin,pass\n";
  for (double rho : rhos) {
    for (const auto& subset : subsets) {
      secmux::validate_subset(layout, subset, true);
      const secmux::PaLhs detail = secmux::pa_lhs_detail(family, rho, lz, subset, guards);
      const double lhs = detail.average;
      const auto bound =
          secmux::pa_rhs(rho, secmux::projected_size(layout, subset), lz, false);
      const double margin = bound.rhs - lhs;
      const bool pass = margin >= -tol;
      all_pass = all_pass && pass;
      json row{{"rho", rho},
               {"subset", secmux::subset_label(subset)},
               {"lhs", lhs},
               {"rhs", bound.rhs},
               {"margin", margin},
               {"pass", pass}};
      if (bound.rhs_uniform) row["rhs_uniform"] = *bound.rhs_uniform;
      if (bound.rhs_discrete) row["rhs_discrete"] = *bound.rhs_discrete;
      if (verbose) row["per_member_mi"] = detail.per_member_mi;
      rows.push_back(row);
      csv << secmux::format_sig(rho) << ',' << secmux::subset_label(subset) << ','
          << secmux::format_sig(lhs) << ',' << secmux::format_sig(bound.rhs) << ','
          << (bound.rhs_uniform ? secmux::format_sig(*bound.rhs_uniform) : std::string()) << ','
          << (bound.rhs_discrete ? secmux::format_sig(*bound.rhs_discrete) : std::string())
          << ',' << secmux::format_sig(margin) << ',' << (pass ? 1 : 0) << '\n';
    }
  }
  emit(opts, json{{"pass", all_pass}, {"tolerance", tol}, {"rows", rows}}, csv.str());
  return all_pass ? 0 : 1;
}

int cmd_psi_phi(const GlobalOptions& opts, bool use_phi) {
  const json cfg = load_config(opts);
  secmux::check_keys(cfg, {"rho", "channel", "prior", "channels"}, use_phi ? "phi" : "psi");
  secmux::ChannelTable table;
  if (cfg.contains("channels")) table = secmux::channel_table_from_json(cfg.at("channels"));
  const double rho = cfg.at("rho").get<double>();
  const secmux::Channel ch = secmux::channel_from_json(cfg.at("channel"), table);
  const secmux::Distribution prior = secmux::distribution_from_json(cfg.at("prior"));
  const double value = use_phi ? secmux::phi(rho, ch, prior) : secmux::psi(rho, ch, prior);
  std::ostringstream csv;
  csv << "rho,value\n"
      << secmux::format_sig(rho) << ',' << secmux::format_sig(display(value, opts)) << '\n';
  emit(opts, json{{"rho", rho}, {use_phi ? "phi" : "psi", value}}, csv.str());
  return 0;
}

int cmd_region_member(const GlobalOptions& opts) {
  const json cfg = load_config(opts);
  secmux::check_keys(cfg, {"region", "markov", "bob", "eve", "rates", "tolerance", "channels"},
                     "region member");
  secmux::ChannelTable table;
  if (cfg.contains("channels")) table = secmux::channel_table_from_json(cfg.at("channels"));
  const std::string region = cfg.at("region").get<std::string>();
  const secmux::MarkovSpec spec = secmux::markov_from_json(cfg.at("markov"), table);
  const secmux::Channel bob = secmux::channel_from_json(cfg.at("bob"), table);
  const secmux::Channel eve = secmux::channel_from_json(cfg.at("eve"), table);
  const double tol = cfg.value("tolerance", secmux::kSlackTol);
  const json& rates = cfg.at("rates");

  secmux::Certificate cert;
  if (region == "bcc") {
    secmux::check_keys(rates, {"r0", "r1", "re"}, "rates");
    cert = secmux::bcc_membership(rates.at("r1").get<double>(), rates.at("re").get<double>(),
                                  rates.at("r0").get<double>(), spec, bob, eve, tol);
  } else if (region == "bcd") {
    secmux::check_keys(rates, {"r0", "r1p"}, "rates");
    cert = secmux::bcd_membership(rates.at("r0").get<double>(), rates.at("r1p").get<double>(),
                                  spec, bob, eve, tol);
  } else if (region == "smc") {
    cert = secmux::smc_membership(secmux::rates_from_json(rates), spec, bob, eve, tol);
  } else {
    throw std::invalid_argument("unknown region type '" + region + "'");
  }

  std::ostringstream csv;
  csv << "name,slack\n";
  for (const auto& e : cert.slacks) {
    csv << e.name << ',' << secmux::format_sig(display(e.slack, opts)) << '\n';
  }
  emit(opts, secmux::certificate_to_json(cert), csv.str());
  return cert.pass ? 0 : 1;
}

int cmd_region_scan(const GlobalOptions& opts) {
  const json cfg = load_config(opts);
  secmux::check_keys(cfg, {"bob", "eve", "card_u", "card_v", "resolution", "channels"},
                     "region scan");
  secmux::ChannelTable table;
  if (cfg.contains("channels")) table = secmux::channel_table_from_json(cfg.at("channels"));
  const secmux::Channel bob = secmux::channel_from_json(cfg.at("bob"), table);
  const secmux::Channel eve = secmux::channel_from_json(cfg.at("eve"), table);
  const auto card_u = cfg.at("card_u").get<std::size_t>();
  const auto card_v = cfg.at("card_v").get<std::size_t>();
  const auto resolution = cfg.at("resolution").get<unsigned>();
  const secmux::Guards guards = guards_from_env();

  if (opts.format == "csv") {
    // rows are streamed, so the CSV path writes directly (atomically via temp)
    std::ofstream file;
    std::ostream* out = &std::cout;
    std::string tmp;
    if (!opts.out_path.empty()) {
      tmp = opts.out_path + ".tmp";
      file.open(tmp, std::ios::binary | std::ios::trunc);
      if (!file) throw std::runtime_error("cannot open " + tmp);
      out = &file;
    }
    *out << "index";
    for (const auto& name : secmux::scan_param_names(card_u, card_v, bob.inputs())) {
      *out << ',' << name;
    }
    *out << ",i_uy,i_uz,i_vy_u,i_vz_u,r0_max,rsum_max,re_max\n";
    const auto summary = secmux::region_scan(
        bob, eve, card_u, card_v, resolution,
        [&](const secmux::ScanRow& row) {
          *out << row.index;
          for (double p : row.params) *out << ',' << secmux::format_sig(p);
          *out << ',' << secmux::format_sig(display(row.iq.i_uy, opts)) << ','
               << secmux::format_sig(display(row.iq.i_uz, opts)) << ','
               << secmux::format_sig(display(row.iq.i_vy_u, opts)) << ','
               << secmux::format_sig(display(row.iq.i_vz_u, opts)) << ','
               << secmux::format_sig(display(row.r0_max, opts)) << ','
               << secmux::format_sig(display(row.rsum_max, opts)) << ','
               << secmux::format_sig(display(row.re_max, opts)) << '\n';
        },
        guards, opts.threads);
    *out << "# best_index=" << summary.best_index
         << " best_re=" << secmux::format_sig(display(summary.best_re, opts)) << '\n';
    if (!opts.out_path.empty()) {
      file.close();
      std::filesystem::rename(tmp, opts.out_path);
    }
    return 0;
  }

  const auto summary = secmux::region_scan(bob, eve, card_u, card_v, resolution, {}, guards,
                                           opts.threads);
  emit(opts,
       json{{"points", summary.points},
            {"param_names", summary.param_names},
            {"best_index", summary.best_index},
            {"best_re", summary.best_re},
            {"best_rsum", summary.best_rsum},
            {"best_params", summary.best_params}},
       "");
  return 0;
}

int cmd_exponent(const GlobalOptions& opts) {
  const json cfg = load_config(opts);
  secmux::check_keys(cfg, {"rho", "r_i", "r_p", "markov", "eve", "joint", "channels"},
                     "exponent");
  secmux::ChannelTable table;
  if (cfg.contains("channels")) table = secmux::channel_table_from_json(cfg.at("channels"));
  const double r_i = cfg.at("r_i").get<double>();
  const double r_p = cfg.at("r_p").get<double>();

  std::optional<secmux::Joint> uvz;
  if (cfg.contains("joint")) {
    secmux::check_keys(cfg.at("joint"), {"card", "p"}, "joint");
    uvz.emplace(cfg.at("joint").at("card").get<std::vector<std::size_t>>(),
                cfg.at("joint").at("p").get<std::vector<double>>());
  } else {
    const secmux::MarkovSpec spec = secmux::markov_from_json(cfg.at("markov"), table);
    const secmux::Channel eve = secmux::channel_from_json(cfg.at("eve"), table);
    uvz = secmux::uvz_joint(spec.p_u, spec.v_given_u, compose(spec.x_given_v, eve));
  }

  std::ostringstream csv;
  if (cfg.contains("rho")) {
    const auto report =
        secmux::leakage_exponent(cfg.at("rho").get<double>(), r_i, r_p, *uvz);
    csv << "rho,r_i,r_p,value\n"
        << secmux::format_sig(report.rho) << ',' << secmux::format_sig(display(r_i, opts))
        << ',' << secmux::format_sig(display(r_p, opts)) << ','
        << secmux::format_sig(display(report.value, opts)) << '\n';
    emit(opts,
         json{{"rho", report.rho}, {"r_i", r_i}, {"r_p", r_p}, {"value", report.value}},
         csv.str());
    return 0;
  }
  const auto search = secmux::optimize_exponent(r_i, r_p, *uvz);
  json grid = json::array();
  csv << "rho,value\n";
  for (const auto& g : search.grid) {
    grid.push_back(json{{"rho", g.rho}, {"value", g.value}});
    csv << secmux::format_sig(g.rho) << ',' << secmux::format_sig(display(g.value, opts))
        << '\n';
  }
  csv << "best," << secmux::format_sig(search.best_rho) << ','
      << secmux::format_sig(display(search.best_value, opts)) << '\n';
  emit(opts,
       json{{"r_i", r_i},
            {"r_p", r_p},
            {"best_rho", search.best_rho},
            {"best_value", search.best_value},
            {"grid", grid}},
       csv.str());
  return 0;
}

int cmd_simulate(const GlobalOptions& opts) {
  const json cfg = load_config(opts);
  secmux::SimulationRun run = secmux::simulation_run_from_json(cfg);
  if (!cfg.contains("f_seed") && opts.seed != 0) run.f_seed = opts.seed;
  const secmux::Guards guards = guards_from_env();
  const secmux::SimulationReport report = secmux::run_simulation(run, guards);

  std::ostringstream csv;
  csv << "subset,n,r_i,r_p,mi,mi_given_common,equivocation,equivocation_rate,"
         "message_entropy,leakage_threshold,error,multiplex_error\n";
  for (std::size_t s = 0; s < report.subsets.size(); ++s) {
    const auto& e = report.best_pair_leakage[s];
    csv << secmux::subset_label(e.subset) << ',' << report.n << ','
        << secmux::format_sig(display(e.r_i, opts)) << ','
        << secmux::format_sig(display(report.r_p, opts)) << ','
        << secmux::format_sig(display(e.mi, opts)) << ','
        << secmux::format_sig(display(e.mi_given_common, opts)) << ','
        << secmux::format_sig(display(e.equivocation, opts)) << ','
        << secmux::format_sig(display(e.equivocation_rate, opts)) << ','
        << secmux::format_sig(display(e.message_entropy, opts)) << ','
        << secmux::format_sig(display(report.existence.leakage_thresholds[s], opts)) << ','
        << secmux::format_sig(report.best_pair_error) << ','
        << secmux::format_sig(report.best_pair_multiplex_error) << '\n';
  }
  emit(opts, secmux::simulation_report_to_json(report), csv.str());
  return report.existence.found ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale toolbox for multiplexed confidential coding"};
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--seed", opts.seed, "seed for randomized commands");
  app.add_option("--out", opts.out_path, "output file (written atomically)");
  app.add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", opts.threads, "worker thread cap");
  app.add_flag("--bits", opts.bits, "display information quantities in bits");

  int which = 0;
  auto add_config = [&opts](CLI::App* cmd) {
    cmd->fallthrough();  // global flags may follow the subcommand
    cmd->add_option("--config", opts.config_path, "JSON config path")->required();
  };

  CLI::App* hash = app.add_subcommand("hash", "hash-family operations");
  hash->require_subcommand(1)->fallthrough();
  add_config(hash->add_subcommand("verify", "verify two-universality of a family")
                 ->parse_complete_callback([&] { which = 1; }));

  CLI::App* pa = app.add_subcommand("pa", "privacy-amplification operations");
  pa->require_subcommand(1)->fallthrough();
  add_config(pa->add_subcommand("check", "exact LHS vs bound over a rho grid")
                 ->parse_complete_callback([&] { which = 2; }));

  add_config(app.add_subcommand("psi", "evaluate the psi functional")
                 ->parse_complete_callback([&] { which = 3; }));
  add_config(app.add_subcommand("phi", "evaluate the phi functional")
                 ->parse_complete_callback([&] { which = 4; }));

  CLI::App* region = app.add_subcommand("region", "rate-region operations");
  region->require_subcommand(1)->fallthrough();
  add_config(region->add_subcommand("scan", "inner-bound boundary scan")
                 ->parse_complete_callback([&] { which = 5; }));
  add_config(region->add_subcommand("member", "membership certificate")
                 ->parse_complete_callback([&] { which = 6; }));

  add_config(app.add_subcommand("exponent", "leakage exponent (fixed rho or optimized)")
                 ->parse_complete_callback([&] { which = 7; }));
  add_config(app.add_subcommand("simulate", "end-to-end encoder/leakage run")
                 ->parse_complete_callback([&] { which = 8; }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // malformed invocation
  }

  try {
    switch (which) {
      case 1: return cmd_hash_verify(opts);
      case 2: return cmd_pa_check(opts);
      case 3: return cmd_psi_phi(opts, false);
      case 4: return cmd_psi_phi(opts, true);
      case 5: return cmd_region_scan(opts);
      case 6: return cmd_region_member(opts);
      case 7: return cmd_exponent(opts);
      case 8: return cmd_simulate(opts);
      default: return 2;
    }
  } catch (const secmux::guard_error& e) {
    std::cerr << "resource guard: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
