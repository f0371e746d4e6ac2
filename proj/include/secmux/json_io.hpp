#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "secmux/channel.hpp"
#include "secmux/hash_family.hpp"
#include "secmux/regions.hpp"
#include "secmux/simulator.hpp"

namespace secmux {

using json = nlohmann::json;

/// Rejects configs carrying keys the schema does not know about.
inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw std::invalid_argument(where + ": unknown field '" + item.key() + "'");
  }
}

inline Distribution distribution_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("distribution: expected an array");
  return Distribution(j.get<std::vector<double>>());
}

inline json distribution_to_json(const Distribution& d) {
  return json(std::vector<double>(d.values().begin(), d.values().end()));
}

using ChannelTable = std::map<std::string, json>;

/// Accepts an inline channel object ({"inputs","outputs","rows"} or a named
/// builder {"type": "bsc"|"bec"|"identity", ...}) or a string referencing an
/// entry of the surrounding config's "channels" table.
inline Channel channel_from_json(const json& j, const ChannelTable& table = {}) {
  if (j.is_string()) {
    const auto it = table.find(j.get<std::string>());
    if (it == table.end()) {
      throw std::invalid_argument("channel name '" + j.get<std::string>() + "' not found");
    }
    return channel_from_json(it->second, {});
  }
  if (!j.is_object()) throw std::invalid_argument("channel: expected an object or name");
  if (j.contains("type")) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "bsc") {
      check_keys(j, {"type", "p"}, "channel");
      return Channel::bsc(j.at("p").get<double>());
    }
    if (type == "bec") {
      check_keys(j, {"type", "eps"}, "channel");
      return Channel::bec(j.at("eps").get<double>());
    }
    if (type == "identity") {
      check_keys(j, {"type", "size"}, "channel");
      return Channel::identity(j.at("size").get<std::size_t>());
    }
    throw std::invalid_argument("channel: unknown type '" + type + "'");
  }
  check_keys(j, {"inputs", "outputs", "rows"}, "channel");
  const auto inputs = j.at("inputs").get<std::size_t>();
  const auto outputs = j.at("outputs").get<std::size_t>();
  const auto rows = j.at("rows").get<std::vector<std::vector<double>>>();
  if (rows.size() != inputs) throw std::invalid_argument("channel: row count mismatch");
  std::vector<double> flat;
  flat.reserve(inputs * outputs);
  for (const auto& r : rows) {
    if (r.size() != outputs) throw std::invalid_argument("channel: row length mismatch");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Channel(inputs, outputs, std::move(flat));
}

inline json channel_to_json(const Channel& c) {
  json rows = json::array();
  for (std::size_t x = 0; x < c.inputs(); ++x) {
    rows.push_back(std::vector<double>(c.row(x).begin(), c.row(x).end()));
  }
  return json{{"inputs", c.inputs()}, {"outputs", c.outputs()}, {"rows", rows}};
}

inline ChannelTable channel_table_from_json(const json& j) {
  ChannelTable table;
  if (!j.is_object()) throw std::invalid_argument("channels: expected an object");
  for (const auto& item : j.items()) table[item.key()] = item.value();
  return table;
}

inline MessageLayout layout_from_json(const json& j) {
  check_keys(j, {"q", "dims"}, "layout");
  return MessageLayout(j.at("q").get<std::uint32_t>(),
                       j.at("dims").get<std::vector<std::uint32_t>>());
}

inline json layout_to_json(const MessageLayout& l) {
  return json{{"q", l.modulus()}, {"dims", l.dims()}};
}

/// Family descriptor: {"kind", "q", "dims"} with optional explicit "members"
/// (row-major residue lists) for linear families.
inline HashFamily family_from_json(const json& j) {
  check_keys(j, {"kind", "q", "dims", "members"}, "family");
  const std::string kind = j.at("kind").get<std::string>();
  MessageLayout layout(j.at("q").get<std::uint32_t>(),
                       j.at("dims").get<std::vector<std::uint32_t>>());
  if (kind == "all-permutations") {
    if (j.contains("members")) {
      throw std::invalid_argument("family: permutation family takes no member list");
    }
    return HashFamily::all_permutations(std::move(layout));
  }
  if (kind != "bijective-linear") {
    throw std::invalid_argument("family: unknown kind '" + kind + "'");
  }
  if (!j.contains("members")) return HashFamily::full_linear(std::move(layout));
  const auto lists = j.at("members").get<std::vector<std::vector<std::uint32_t>>>();
  const std::size_t k = layout.total_dim();
  std::vector<GfMatrix> members;
  members.reserve(lists.size());
  for (const auto& flat : lists) {
    if (flat.size() != k * k) {
      throw std::invalid_argument("family: member must hold K*K residues");
    }
    GfMatrix m(k, k, layout.modulus());
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) m.set(r, c, flat[r * k + c]);
    }
    members.push_back(std::move(m));
  }
  return HashFamily::linear_members(std::move(layout), std::move(members));
}

inline json family_to_json(const HashFamily& f) {
  json j{{"kind", f.kind() == FamilyKind::all_permutations ? "all-permutations"
                                                           : "bijective-linear"},
         {"q", f.layout().modulus()},
         {"dims", f.layout().dims()}};
  if (f.has_explicit_members()) {
    json members = json::array();
    for (const auto& m : f.explicit_members()) {
      members.push_back(std::vector<std::uint32_t>(m.entries().begin(), m.entries().end()));
    }
    j["members"] = members;
  }
  return j;
}

inline MarkovSpec markov_from_json(const json& j, const ChannelTable& table = {}) {
  check_keys(j, {"p_u", "v_given_u", "x_given_v"}, "markov");
  return MarkovSpec(distribution_from_json(j.at("p_u")),
                    channel_from_json(j.at("v_given_u"), table),
                    channel_from_json(j.at("x_given_v"), table));
}

inline RateTuple rates_from_json(const json& j) {
  check_keys(j, {"r0", "r", "re"}, "rates");
  RateTuple rates;
  rates.r0 = j.at("r0").get<double>();
  rates.r = j.at("r").get<std::vector<double>>();
  for (const auto& item : j.at("re").items()) {
    rates.re[parse_subset_label(item.key())] = item.value().get<double>();
  }
  return rates;
}

inline json certificate_to_json(const Certificate& cert) {
  json slacks = json::array();
  for (const auto& e : cert.slacks) {
    slacks.push_back(json{{"name", e.name}, {"slack", e.slack}});
  }
  return json{{"pass", cert.pass}, {"tolerance", cert.tolerance}, {"slacks", slacks}};
}

inline json two_universal_report_to_json(const TwoUniversalReport& r) {
  return json{{"max_ratio", r.max_ratio.str()},
              {"max_ratio_value", r.max_ratio.value()},
              {"bound", r.bound.str()},
              {"bound_value", r.bound.value()},
              {"pass", r.pass},
              {"worst_pair", {r.worst_x1, r.worst_x2}},
              {"members", r.member_count}};
}

inline json leakage_entry_to_json(const LeakageEntry& e) {
  return json{{"subset", subset_label(e.subset)},
              {"r_i", e.r_i},
              {"mi", e.mi},
              {"mi_given_common", e.mi_given_common},
              {"equivocation", e.equivocation},
              {"equivocation_rate", e.equivocation_rate},
              {"message_entropy", e.message_entropy}};
}

inline json bound_row_to_json(const BoundCheckRow& r) {
  return json{{"rho", r.rho},
              {"lhs_avg_exp", r.lhs_avg_exp},
              {"rhs", r.rhs},
              {"phi_term", r.phi_term},
              {"i_vz_u", r.i_vz_u},
              {"eps_rho", r.eps_rho},
              {"rate_gap", r.rate_gap},
              {"equivocation_bound", r.equivocation_bound},
              {"bound_applicable", r.bound_applicable},
              {"holds", r.holds}};
}

inline json simulation_report_to_json(const SimulationReport& rep) {
  json subsets = json::array();
  for (const auto& s : rep.subsets) subsets.push_back(subset_label(s));
  json evals = json::array();
  for (const auto& ev : rep.existence.evaluations) {
    json leak = json::array();
    for (const auto& e : ev.leakage) leak.push_back(leakage_entry_to_json(e));
    evals.push_back(json{{"f_index", ev.f_index},
                         {"cb_index", ev.cb_index},
                         {"error", ev.error},
                         {"leakage", leak}});
  }
  json best_leak = json::array();
  for (const auto& e : rep.best_pair_leakage) best_leak.push_back(leakage_entry_to_json(e));
  json bounds = json::object();
  for (const auto& [subset, rows] : rep.bound_rows) {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(bound_row_to_json(r));
    bounds[subset_label(subset)] = arr;
  }
  json feas = json::object();
  for (const auto& [subset, flag] : rep.feasibility) feas[subset_label(subset)] = flag;
  return json{{"n", rep.n},
              {"r_p", rep.r_p},
              {"r_common", rep.r_common},
              {"r_secret", rep.r_secret},
              {"subsets", subsets},
              {"num_f", rep.num_f},
              {"num_codebooks", rep.num_codebooks},
              {"existence",
               json{{"found", rep.existence.found},
                    {"best_f", rep.existence.best_f},
                    {"best_cb", rep.existence.best_cb},
                    {"multiplier", rep.existence.multiplier},
                    {"average_leakage", rep.existence.average_leakage},
                    {"leakage_thresholds", rep.existence.leakage_thresholds},
                    {"average_error", rep.existence.average_error},
                    {"error_threshold", rep.existence.error_threshold}}},
              {"evaluations", evals},
              {"best_pair_leakage", best_leak},
              {"best_pair_error", rep.best_pair_error},
              {"best_pair_multiplex_error", rep.best_pair_multiplex_error},
              {"i_vz_u", rep.i_vz_u},
              {"bound_check", bounds},
              {"feasibility", feas}};
}

/// Simulation config schema; see README for a worked example.
inline SimulationRun simulation_run_from_json(const json& j) {
  check_keys(j,
             {"layout", "n", "p_u", "v_given_u", "x_given_v", "bob", "eve", "num_common",
              "common_dist", "channels", "family", "f_tables", "num_f", "f_seed",
              "codebook_seeds", "rho_grid", "subsets", "target_re", "existence_multiplier"},
             "simulate");
  ChannelTable table;
  if (j.contains("channels")) table = channel_table_from_json(j.at("channels"));
  MessageLayout layout = layout_from_json(j.at("layout"));
  const auto n = j.at("n").get<std::size_t>();
  const auto num_common = j.value("num_common", std::size_t{1});
  std::optional<Distribution> common;
  if (j.contains("common_dist")) common = distribution_from_json(j.at("common_dist"));
  SimulationSetup setup(std::move(layout), n, distribution_from_json(j.at("p_u")),
                        channel_from_json(j.at("v_given_u"), table),
                        channel_from_json(j.at("x_given_v"), table),
                        channel_from_json(j.at("bob"), table),
                        channel_from_json(j.at("eve"), table), num_common, std::move(common));

  SimulationRun run{std::move(setup), {}, std::nullopt, std::nullopt, 0, 0, {}, {}, {}, 0.0};
  run.codebook_seeds = j.at("codebook_seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("family")) run.family = family_from_json(j.at("family"));
  if (j.contains("f_tables")) {
    run.f_tables = j.at("f_tables").get<std::vector<std::vector<std::uint32_t>>>();
  }
  run.num_sampled_f = j.value("num_f", std::size_t{0});
  run.f_seed = j.value("f_seed", std::uint64_t{0});
  if (j.contains("rho_grid")) run.rho_grid = j.at("rho_grid").get<std::vector<double>>();
  if (j.contains("subsets")) {
    for (const auto& s : j.at("subsets")) run.subsets.push_back(s.get<Subset>());
  }
  if (j.contains("target_re")) {
    for (const auto& item : j.at("target_re").items()) {
      run.target_re[parse_subset_label(item.key())] = item.value().get<double>();
    }
  }
  run.existence_multiplier = j.value("existence_multiplier", 0.0);
  return run;
}

/// 12-significant-digit decimal rendering used by every CSV emitter.
inline std::string format_sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

/// Writes via a temp file and rename so readers never see partial output.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    if (!out.good()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace secmux
