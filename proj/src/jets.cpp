#include "cylfin/jets.hpp"

#include <algorithm>
#include <unordered_map>

namespace cylfin {

namespace {

// Enumerate exponent tuples of total degree <= order, graded lexicographic.
void enumerate(std::vector<int>& cur, int var, int remaining, std::vector<std::vector<int>>& out) {
  if (var == static_cast<int>(cur.size())) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur[var] = e;
    enumerate(cur, var + 1, remaining - e, out);
  }
  cur[var] = 0;
}

std::int64_t encode(const std::vector<int>& e, int radix) {
  std::int64_t code = 0;
  for (int v : e) code = code * radix + v;
  return code;
}

}  // namespace

MJSpace::MJSpace(int nv, int k) : nvars(nv), order(k) {
  std::vector<std::vector<int>> by_degree;
  std::vector<int> cur(nv, 0);
  enumerate(cur, 0, k, by_degree);
  // sort by total degree so slot 0 is the constant
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [](const std::vector<int>& a, const std::vector<int>& b) {
                     int da = 0, db = 0;
                     for (int v : a) da += v;
                     for (int v : b) db += v;
                     return da < db;
                   });
  expo = std::move(by_degree);
  const int radix = k + 2;
  std::unordered_map<std::int64_t, int> slot;
  degree.resize(expo.size());
  for (std::size_t i = 0; i < expo.size(); ++i) {
    int d = 0;
    for (int v : expo[i]) d += v;
    degree[i] = d;
    slot[encode(expo[i], radix)] = static_cast<int>(i);
  }
  prod.assign(expo.size(), std::vector<int>(expo.size(), -1));
  std::vector<int> sum(nv);
  for (std::size_t i = 0; i < expo.size(); ++i)
    for (std::size_t j = 0; j < expo.size(); ++j) {
      if (degree[i] + degree[j] > k) continue;
      for (int v = 0; v < nv; ++v) sum[v] = expo[i][v] + expo[j][v];
      prod[i][j] = slot.at(encode(sum, radix));
    }
  dshift.assign(expo.size(), std::vector<int>(nv, -1));
  for (std::size_t i = 0; i < expo.size(); ++i)
    for (int v = 0; v < nv; ++v) {
      if (expo[i][v] == 0) continue;
      std::vector<int> e = expo[i];
      e[v] -= 1;
      dshift[i][v] = slot.at(encode(e, radix));
    }
}

std::shared_ptr<const MJSpace> MJSpace::get(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MJSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nvars, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto sp = std::shared_ptr<const MJSpace>(new MJSpace(nvars, order));
  cache[key] = sp;
  return sp;
}

double MultiJet::partial(const std::vector<int>& e) const {
  const int radix = sp->order + 2;
  std::int64_t code = 0;
  for (int v : e) code = code * radix + v;
  double fact = 1.0;
  for (int v : e) fact *= factorial(v);
  for (std::size_t i = 0; i < sp->expo.size(); ++i) {
    std::int64_t ci = 0;
    for (int v : sp->expo[i]) ci = ci * radix + v;
    if (ci == code) return c[i] * fact;
  }
  throw std::logic_error("MultiJet::partial: exponent outside space");
}

MultiJet compose_sz(const SZJet& table, const MultiJet& s, const MultiJet& z) {
  MultiJet ds = s;
  ds.c[0] -= table.s0;
  MultiJet dz = z;
  dz.c[0] -= table.z0;
  // powers of the offset jets
  int cs = table.cs, cz = table.cz;
  int kmax = s.sp->order;
  std::vector<MultiJet> sp_pows, zp_pows;
  MultiJet one(s.sp, 1.0);
  sp_pows.push_back(one);
  for (int c = 1; c <= std::min(cs, kmax); ++c) sp_pows.push_back(sp_pows.back() * ds);
  zp_pows.push_back(one);
  for (int d = 1; d <= std::min(cz, kmax); ++d) zp_pows.push_back(zp_pows.back() * dz);
  MultiJet out(s.sp, 0.0);
  for (int c = 0; c < static_cast<int>(sp_pows.size()); ++c)
    for (int d = 0; d < static_cast<int>(zp_pows.size()); ++d) {
      if (c + d > kmax) continue;
      double coeff = table.at(c, d) / (factorial(c) * factorial(d));
      if (coeff == 0.0) continue;
      out = out + coeff * (sp_pows[c] * zp_pows[d]);
    }
  return out;
}

}  // namespace cylfin
