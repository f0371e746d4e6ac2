#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "secmux/info.hpp"
#include "secmux/layout.hpp"

namespace secmux {

/// Per-inequality slack report; pass iff every slack >= -kSlackTol.
struct Certificate {
  struct Entry {
    std::string name;
    double slack = 0.0;
  };
  std::vector<Entry> slacks;
  bool pass = false;
  double tolerance = kSlackTol;

  void finish() {
    pass = true;
    for (const auto& e : slacks) {
      if (e.slack < -tolerance) pass = false;
    }
  }
};

/// Membership in the confidential-message broadcast region for the rate
/// triple (R_1, R_e, R_0) under the given auxiliary chain.
inline Certificate bcc_membership(double r1, double re, double r0, const MarkovSpec& spec,
                                  const Channel& bob, const Channel& eve,
                                  double tolerance = kSlackTol) {
  const InfoQuantities iq = markov_informations(spec, bob, eve);
  Certificate cert;
  cert.tolerance = tolerance;
  cert.slacks = {
      {"r1_plus_r0", iq.i_vy_u + iq.min_i_u() - (r1 + r0)},
      {"r0", iq.min_i_u() - r0},
      {"re_secrecy", iq.i_vy_u - iq.i_vz_u - re},
      {"re_le_r1", r1 - re},
  };
  cert.finish();
  return cert;
}

/// Degraded-message-set region (secrecy requirement removed); requires V = X.
inline Certificate bcd_membership(double r0, double r1_prime, const MarkovSpec& spec,
                                  const Channel& bob, const Channel& eve,
                                  double tolerance = kSlackTol) {
  if (!spec.x_given_v.is_identity()) {
    throw std::invalid_argument("bcd membership requires an identity P_{X|V} (V = X)");
  }
  const InfoQuantities iq = markov_informations(spec, bob, eve);
  Certificate cert;
  cert.tolerance = tolerance;
  cert.slacks = {
      {"r0", iq.min_i_u() - r0},
      {"r0_plus_r1", iq.i_vy_u + iq.min_i_u() - (r0 + r1_prime)},
  };
  cert.finish();
  return cert;
}

/// Rates for the multiplexed scheme: common rate, per-message rates, and the
/// equivocation target for every nonempty subset of {1..T}.
struct RateTuple {
  double r0 = 0.0;
  std::vector<double> r;            // R_1 .. R_T
  std::map<Subset, double> re;      // R_{e,I} for every nonempty I
};

inline Certificate smc_membership(const RateTuple& rates, const MarkovSpec& spec,
                                  const Channel& bob, const Channel& eve,
                                  double tolerance = kSlackTol) {
  const std::size_t t = rates.r.size();
  if (t == 0) throw std::invalid_argument("need at least one secret message");
  const auto subsets = all_nonempty_subsets(t);
  if (rates.re.size() != subsets.size()) {
    throw std::invalid_argument("equivocation map must cover all nonempty subsets");
  }
  const InfoQuantities iq = markov_informations(spec, bob, eve);
  Certificate cert;
  cert.tolerance = tolerance;
  double rate_sum = rates.r0;
  for (double ri : rates.r) rate_sum += ri;
  cert.slacks.push_back({"r0", iq.min_i_u() - rates.r0});
  cert.slacks.push_back({"rate_sum", iq.i_vy_u + iq.min_i_u() - rate_sum});
  for (const auto& subset : subsets) {
    const auto it = rates.re.find(subset);
    if (it == rates.re.end()) {
      throw std::invalid_argument("equivocation map missing subset {" + subset_label(subset) + "}");
    }
    const double re = it->second;
    double subset_rate = 0.0;
    for (int i : subset) subset_rate += rates.r.at(static_cast<std::size_t>(i) - 1);
    cert.slacks.push_back({"re{" + subset_label(subset) + "}_secrecy",
                           iq.i_vy_u - iq.i_vz_u - re});
    cert.slacks.push_back({"re{" + subset_label(subset) + "}_le_rates", subset_rate - re});
  }
  cert.finish();
  return cert;
}

/// Lattice on the probability simplex: all points c/m with c a nonnegative
/// integer composition of m into `dim` parts. `resolution` points per edge,
/// so m = resolution - 1.
inline std::vector<std::vector<double>> simplex_lattice(std::size_t dim, unsigned resolution) {
  if (dim == 0) throw std::invalid_argument("simplex dimension must be >= 1");
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  const unsigned m = resolution - 1;
  std::vector<std::vector<double>> points;
  std::vector<unsigned> c(dim, 0);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t pos, unsigned left) {
    if (pos + 1 == dim) {
      c[pos] = left;
      std::vector<double> p(dim);
      for (std::size_t i = 0; i < dim; ++i) p[i] = static_cast<double>(c[i]) / m;
      points.push_back(std::move(p));
      return;
    }
    for (unsigned v = 0; v <= left; ++v) {
      c[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  if (dim == 1) {
    points.push_back({1.0});
  } else {
    rec(0, m);
  }
  return points;
}

struct ScanRow {
  std::uint64_t index = 0;
  std::vector<double> params;  // flattened P_U | P_{V|U} rows | P_{X|V} rows
  InfoQuantities iq;
  double r0_max = 0.0;
  double rsum_max = 0.0;
  double re_max = 0.0;
};

struct ScanSummary {
  std::vector<std::string> param_names;
  std::uint64_t points = 0;
  std::uint64_t best_index = 0;
  double best_re = 0.0;
  std::vector<double> best_params;
  double best_rsum = 0.0;
};

/// Column names for the flattened grid parameters of a scan row.
inline std::vector<std::string> scan_param_names(std::size_t card_u, std::size_t card_v,
                                                 std::size_t card_x) {
  std::vector<std::string> names;
  for (std::size_t u = 0; u < card_u; ++u) names.push_back("pU" + std::to_string(u));
  for (std::size_t u = 0; u < card_u; ++u) {
    for (std::size_t v = 0; v < card_v; ++v) {
      names.push_back("pVU_u" + std::to_string(u) + "_v" + std::to_string(v));
    }
  }
  for (std::size_t v = 0; v < card_v; ++v) {
    for (std::size_t x = 0; x < card_x; ++x) {
      names.push_back("pXV_v" + std::to_string(v) + "_x" + std::to_string(x));
    }
  }
  return names;
}

// Inner-bound explorer: sweeps a deterministic lattice over (P_U, P_{V|U},
// P_{X|V}) at the configured auxiliary cardinalities and reports, per grid
// point, the achievable corner rates. The auxiliary cardinalities are inputs,
// not derived bounds, so the scan is an inner approximation by construction.
inline ScanSummary region_scan(const Channel& bob, const Channel& eve, std::size_t card_u,
                               std::size_t card_v, unsigned resolution,
                               const std::function<void(const ScanRow&)>& row_sink = {},
                               const Guards& guards = {}, unsigned threads = 1) {
  if (card_u == 0 || card_v == 0 || card_u > 4 || card_v > 4) {
    throw std::invalid_argument("auxiliary cardinalities must be in 1..4");
  }
  if (bob.inputs() != eve.inputs()) throw std::invalid_argument("receiver input mismatch");
  const std::size_t card_x = bob.inputs();

  const auto u_points = simplex_lattice(card_u, resolution);
  const auto v_points = simplex_lattice(card_v, resolution);
  const auto x_points = simplex_lattice(card_x, resolution);

  // grid = u_points x v_points^card_u x x_points^card_v, odometer order
  std::uint64_t total = u_points.size();
  for (std::size_t i = 0; i < card_u; ++i) total *= v_points.size();
  for (std::size_t i = 0; i < card_v; ++i) total *= x_points.size();
  if (total > guards.scan_points) throw_guard("scan_points", total, guards.scan_points);

  ScanSummary summary;
  summary.points = total;
  summary.param_names = scan_param_names(card_u, card_v, card_x);

  const std::size_t n_vu = card_u;  // number of P_{V|U} row choices
  const std::size_t n_xv = card_v;  // number of P_{X|V} row choices

  auto eval_point = [&](std::uint64_t index, ScanRow& row) {
    std::uint64_t rest = index;
    std::vector<std::size_t> xsel(n_xv), vsel(n_vu);
    for (std::size_t i = n_xv; i-- > 0;) {
      xsel[i] = static_cast<std::size_t>(rest % x_points.size());
      rest /= x_points.size();
    }
    for (std::size_t i = n_vu; i-- > 0;) {
      vsel[i] = static_cast<std::size_t>(rest % v_points.size());
      rest /= v_points.size();
    }
    const auto& pu = u_points[static_cast<std::size_t>(rest)];

    // dense quantities without Channel validation overhead
    const std::size_t ny = bob.outputs(), nz = eve.outputs();
    std::vector<double> wy(card_v * ny, 0.0), wz(card_v * nz, 0.0);
    for (std::size_t v = 0; v < card_v; ++v) {
      const auto& px = x_points[xsel[v]];
      for (std::size_t x = 0; x < card_x; ++x) {
        if (px[x] == 0.0) continue;
        for (std::size_t y = 0; y < ny; ++y) wy[v * ny + y] += px[x] * bob.at(x, y);
        for (std::size_t z = 0; z < nz; ++z) wz[v * nz + z] += px[x] * eve.at(x, z);
      }
    }
    std::vector<double> puy(card_u * ny, 0.0), puz(card_u * nz, 0.0);
    std::vector<double> pvy(card_v * ny), pvz(card_v * nz);
    InfoQuantities iq;
    for (std::size_t u = 0; u < card_u; ++u) {
      const auto& pv = v_points[vsel[u]];
      std::fill(pvy.begin(), pvy.end(), 0.0);
      std::fill(pvz.begin(), pvz.end(), 0.0);
      for (std::size_t v = 0; v < card_v; ++v) {
        if (pv[v] == 0.0) continue;
        for (std::size_t y = 0; y < ny; ++y) pvy[v * ny + y] = pv[v] * wy[v * ny + y];
        for (std::size_t z = 0; z < nz; ++z) pvz[v * nz + z] = pv[v] * wz[v * nz + z];
      }
      const double pu_u = pu[u];
      for (std::size_t v = 0; v < card_v; ++v) {
        for (std::size_t y = 0; y < ny; ++y) puy[u * ny + y] += pu_u * pvy[v * ny + y];
        for (std::size_t z = 0; z < nz; ++z) puz[u * nz + z] += pu_u * pvz[v * nz + z];
      }
      if (pu_u > 0.0) {
        iq.i_vy_u += pu_u * detail::mi_2d(pvy, card_v, ny);
        iq.i_vz_u += pu_u * detail::mi_2d(pvz, card_v, nz);
      }
    }
    iq.i_uy = detail::mi_2d(puy, card_u, ny);
    iq.i_uz = detail::mi_2d(puz, card_u, nz);

    row.index = index;
    row.iq = iq;
    row.r0_max = iq.min_i_u();
    row.rsum_max = iq.i_vy_u + iq.min_i_u();
    row.re_max = std::max(0.0, iq.i_vy_u - iq.i_vz_u);
    row.params.clear();
    row.params.insert(row.params.end(), pu.begin(), pu.end());
    for (std::size_t u = 0; u < card_u; ++u) {
      const auto& pv = v_points[vsel[u]];
      row.params.insert(row.params.end(), pv.begin(), pv.end());
    }
    for (std::size_t v = 0; v < card_v; ++v) {
      const auto& px = x_points[xsel[v]];
      row.params.insert(row.params.end(), px.begin(), px.end());
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, std::thread::hardware_concurrency()));
  summary.best_re = -1.0;
  const std::uint64_t chunk_size = 8192;

  std::vector<ScanRow> buffer;
  for (std::uint64_t begin = 0; begin < total; begin += chunk_size) {
    const std::uint64_t end = std::min(total, begin + chunk_size);
    buffer.assign(static_cast<std::size_t>(end - begin), ScanRow{});
    if (workers <= 1 || end - begin < 256) {
      for (std::uint64_t i = begin; i < end; ++i) {
        eval_point(i, buffer[static_cast<std::size_t>(i - begin)]);
      }
    } else {
      std::vector<std::thread> pool;
      const std::uint64_t stride = (end - begin + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t b = begin + std::min<std::uint64_t>(end - begin, w * stride);
        const std::uint64_t e = std::min(end, b + stride);
        pool.emplace_back([&, b, e, begin] {
          for (std::uint64_t i = b; i < e; ++i) {
            eval_point(i, buffer[static_cast<std::size_t>(i - begin)]);
          }
        });
      }
      for (auto& th : pool) th.join();
    }
    for (auto& row : buffer) {
      if (row.re_max > summary.best_re) {
        summary.best_re = row.re_max;
        summary.best_index = row.index;
        summary.best_params = row.params;
        summary.best_rsum = row.rsum_max;
      }
      if (row_sink) row_sink(row);
    }
  }
  return summary;
}

/// Single-letter leakage exponent
/// rho (R_I - R_p) + log sum_{u,v,z} P_{UVZ}(u,v,z) P_{Z|V}(z|v)^rho P_{Z|U}(z|u)^{-rho};
/// a negative value certifies exponential decay at |value| nats per symbol.
struct ExponentReport {
  double rho = 0.0;
  double r_i = 0.0;
  double r_p = 0.0;
  double value = 0.0;
};

inline ExponentReport leakage_exponent(double rho, double r_i, double r_p, const Joint& uvz) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("leakage_exponent needs rho in (0, 1]");
  }
  if (uvz.rank() != 3) throw std::invalid_argument("expected a joint over (U, V, Z)");
  const std::size_t nu = uvz.card(0), nv = uvz.card(1), nz = uvz.card(2);
  const Joint p_uz = uvz.marginal({0, 2});
  const Joint p_vz = uvz.marginal({1, 2});
  const Distribution p_u = uvz.marginal_dist(0);
  const Distribution p_v = uvz.marginal_dist(1);

  std::vector<double> terms;
  terms.reserve(uvz.size());
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t z = 0; z < nz; ++z) {
        const double p = uvz.at_flat((u * nv + v) * nz + z);
        if (p == 0.0) continue;
        const double z_given_v = p_vz.at_flat(v * nz + z) / p_v[v];
        const double z_given_u = p_uz.at_flat(u * nz + z) / p_u[u];
        terms.push_back(std::log(p) + rho * std::log(z_given_v) - rho * std::log(z_given_u));
      }
    }
  }
  ExponentReport report;
  report.rho = rho;
  report.r_i = r_i;
  report.r_p = r_p;
  report.value = rho * (r_i - r_p) + log_sum_exp(terms);
  return report;
}

struct ExponentSearch {
  double best_rho = 0.0;
  double best_value = 0.0;
  std::vector<ExponentReport> grid;
};

/// Minimizes the exponent over rho in (0, 1]: a 64-point grid followed by
/// golden-section refinement around the best grid point.
inline ExponentSearch optimize_exponent(double r_i, double r_p, const Joint& uvz) {
  constexpr int kGridPoints = 64;
  ExponentSearch search;
  search.grid.reserve(kGridPoints);
  int best_j = 1;
  for (int j = 1; j <= kGridPoints; ++j) {
    const double rho = static_cast<double>(j) / kGridPoints;
    search.grid.push_back(leakage_exponent(rho, r_i, r_p, uvz));
    if (search.grid.back().value < search.grid[best_j - 1].value) best_j = j;
  }
  double lo = std::max(1e-9, (best_j - 1.0) / kGridPoints);
  double hi = std::min(1.0, (best_j + 1.0) / kGridPoints);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = leakage_exponent(c, r_i, r_p, uvz).value;
  double fd = leakage_exponent(d, r_i, r_p, uvz).value;
  for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = leakage_exponent(c, r_i, r_p, uvz).value;
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = leakage_exponent(d, r_i, r_p, uvz).value;
    }
  }
  search.best_rho = (fc < fd) ? c : d;
  search.best_value = std::min(fc, fd);
  // never report worse than the grid itself
  if (search.grid[best_j - 1].value < search.best_value) {
    search.best_rho = search.grid[best_j - 1].rho;
    search.best_value = search.grid[best_j - 1].value;
  }
  return search;
}

/// P(u, v, z) for the chain U -> V -> Z built from explicit components.
inline Joint uvz_joint(const Distribution& p_u, const Channel& v_given_u,
                       const Channel& z_given_v) {
  if (p_u.size() != v_given_u.inputs() || v_given_u.outputs() != z_given_v.inputs()) {
    throw std::invalid_argument("uvz chain dimension mismatch");
  }
  const std::size_t nu = p_u.size(), nv = v_given_u.outputs(), nz = z_given_v.outputs();
  std::vector<double> p(nu * nv * nz);
  std::size_t f = 0;
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t z = 0; z < nz; ++z) {
        p[f++] = p_u[u] * v_given_u.at(u, v) * z_given_v.at(v, z);
      }
    }
  }
  return Joint({nu, nv, nz}, std::move(p));
}

}  // namespace secmux
