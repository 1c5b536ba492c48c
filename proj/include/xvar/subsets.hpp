#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <xvar/errors.hpp>

namespace xvar {

// Subsets of the asset index set {1,...,d} are bitmasks: bit j-1 encodes
// membership of asset j. Dimension is capped at 20 so complete families
// (2^d - 1 subsets) stay enumerable.
using SubsetId = std::uint32_t;

inline constexpr int kMaxDimension = 20;

inline void check_dimension(int d) {
  if (d < 1 || d > kMaxDimension)
    throw InvalidInput("dimension d must be in [1, " +
                       std::to_string(kMaxDimension) + "], got " +
                       std::to_string(d));
}

inline int subset_size(SubsetId s) { return std::popcount(s); }

inline SubsetId full_set(int d) {
  check_dimension(d);
  return (SubsetId{1} << d) - 1;
}

// Ordering used everywhere a family or LP column set is enumerated:
// ascending by (cardinality, mask). Deterministic layouts keep solver
// output and serialized files byte-stable.
inline bool subset_order_less(SubsetId a, SubsetId b) {
  const int sa = subset_size(a), sb = subset_size(b);
  return sa != sb ? sa < sb : a < b;
}

// All non-empty subsets of {1,...,d} in (size, mask) order.
inline std::vector<SubsetId> enumerate_subsets(int d) {
  check_dimension(d);
  std::vector<SubsetId> out;
  out.reserve((std::size_t{1} << d) - 1);
  for (SubsetId s = 1; s <= full_set(d); ++s) out.push_back(s);
  std::sort(out.begin(), out.end(), subset_order_less);
  return out;
}

inline std::vector<int> subset_elements(SubsetId s) {
  std::vector<int> elems;
  for (int j = 0; s != 0; ++j, s >>= 1)
    if (s & 1u) elems.push_back(j + 1);
  return elems;
}

inline SubsetId subset_from_elements(const std::vector<int>& elems, int d) {
  check_dimension(d);
  SubsetId s = 0;
  for (int j : elems) {
    if (j < 1 || j > d)
      throw InvalidInput("subset element " + std::to_string(j) +
                         " outside 1.." + std::to_string(d));
    const SubsetId bit = SubsetId{1} << (j - 1);
    if (s & bit)
      throw InvalidInput("duplicate subset element " + std::to_string(j));
    s |= bit;
  }
  if (s == 0) throw InvalidInput("empty subset");
  return s;
}

// Text form used in JSON keys: "[1,3,7]", elements sorted ascending.
inline std::string subset_label(SubsetId s) {
  std::string out = "[";
  bool first = true;
  for (int j : subset_elements(s)) {
    if (!first) out += ',';
    out += std::to_string(j);
    first = false;
  }
  return out + "]";
}

inline SubsetId subset_from_label(const std::string& label, int d) {
  std::string trimmed;
  for (char c : label)
    if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
  if (trimmed.size() < 3 || trimmed.front() != '[' || trimmed.back() != ']')
    throw InvalidInput("bad subset label '" + label + "'");
  std::vector<int> elems;
  std::stringstream ss(trimmed.substr(1, trimmed.size() - 2));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      elems.push_back(v);
    } catch (const std::exception&) {
      throw InvalidInput("bad subset label '" + label + "'");
    }
  }
  return subset_from_elements(elems, d);
}

// A set of subsets J with attached extremal-coefficient values c_J.
// Entries are kept sorted by (size, mask) once finalize() has run.
struct SubsetFamily {
  int d = 0;
  std::vector<SubsetId> sets;
  std::vector<double> values;

  SubsetFamily() = default;
  explicit SubsetFamily(int dim) : d(dim) { check_dimension(dim); }

  std::size_t size() const { return sets.size(); }

  void add(SubsetId J, double value) {
    if (J == 0 || J > full_set(d))
      throw InvalidInput("subset mask outside dimension " + std::to_string(d));
    sets.push_back(J);
    values.push_back(value);
  }

  void add(const std::vector<int>& elems, double value) {
    add(subset_from_elements(elems, d), value);
  }

  // Sorts into canonical order and rejects duplicate subsets.
  void finalize() {
    std::vector<std::size_t> idx(sets.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return subset_order_less(sets[a], sets[b]);
    });
    std::vector<SubsetId> s2(sets.size());
    std::vector<double> v2(sets.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      s2[i] = sets[idx[i]];
      v2[i] = values[idx[i]];
    }
    for (std::size_t i = 1; i < s2.size(); ++i)
      if (s2[i] == s2[i - 1])
        throw InvalidInput("duplicate subset " + subset_label(s2[i]) +
                           " in family");
    sets = std::move(s2);
    values = std::move(v2);
  }

  int index_of(SubsetId J) const {
    const auto it = std::lower_bound(sets.begin(), sets.end(), J,
                                     subset_order_less);
    if (it == sets.end() || *it != J) return -1;
    return static_cast<int>(it - sets.begin());
  }

  bool has(SubsetId J) const { return index_of(J) >= 0; }

  double value_of(SubsetId J) const {
    const int i = index_of(J);
    if (i < 0)
      throw InvalidInput("subset " + subset_label(J) + " not in family");
    return values[static_cast<std::size_t>(i)];
  }

  bool complete() const { return size() == (std::size_t{1} << d) - 1; }

  bool has_all_singletons() const {
    for (int j = 0; j < d; ++j)
      if (!has(SubsetId{1} << j)) return false;
    return true;
  }

  // Family of the d singletons, each standardized to 1.
  static SubsetFamily singletons(int d) {
    SubsetFamily f(d);
    for (int j = 0; j < d; ++j) f.add(SubsetId{1} << j, 1.0);
    f.finalize();
    return f;
  }

  // Constraint families fed to the bound programs must carry all
  // singletons at the standardized value 1 and values within [1, |J|].
  void require_constraint_form(double tol = 1e-9) const {
    for (int j = 0; j < d; ++j) {
      const SubsetId s = SubsetId{1} << j;
      const int i = index_of(s);
      if (i < 0)
        throw InvalidInput("constraint family missing singleton " +
                           subset_label(s));
      if (std::abs(values[static_cast<std::size_t>(i)] - 1.0) > tol)
        throw InconsistentInput("singleton " + subset_label(s) +
                                " must have coefficient 1");
    }
    for (std::size_t i = 0; i < size(); ++i) {
      const double lo = 1.0 - tol;
      const double hi = subset_size(sets[i]) + tol;
      if (values[i] < lo || values[i] > hi)
        throw InconsistentInput("coefficient for " + subset_label(sets[i]) +
                                " outside [1, |J|]");
    }
  }
};

// Nonnegative inclusion-exclusion coordinates beta_K of a valid
// coefficient vector, indexed by subset mask (beta[K-1] belongs to K).
struct MobiusWeights {
  int d = 0;
  std::vector<double> beta;

  double of(SubsetId K) const { return beta[K - 1]; }
  double total_mass() const {
    double m = 0;
    for (double b : beta) m += b;
    return m;
  }
};

namespace detail {

// Dense value table indexed by mask; requires a complete family.
inline std::vector<double> value_table(const SubsetFamily& theta) {
  if (!theta.complete())
    throw InvalidInput("operation requires a complete coefficient family");
  std::vector<double> val(std::size_t{1} << theta.d, 0.0);
  for (std::size_t i = 0; i < theta.size(); ++i)
    val[theta.sets[i]] = theta.values[i];
  return val;
}

}  // namespace detail

// Inverts sum_{K: K∩J≠∅} beta_K = theta(J) over all non-empty J.
// With g(M) := theta(D) - theta(D\M) = sum_{∅≠K⊆M} beta_K, lattice Möbius
// inversion gives beta_K = sum_{M⊆K} (-1)^{|K\M|+1} theta(D\M), theta(∅):=0.
// The direct inclusion-exclusion sum costs O(3^d); the in-place subset
// difference transform costs O(d 2^d) and takes over for d > 12.
inline MobiusWeights mobius_weights(const SubsetFamily& theta) {
  const auto val = detail::value_table(theta);
  const int d = theta.d;
  const SubsetId full = full_set(d);
  MobiusWeights mw;
  mw.d = d;
  mw.beta.assign(full, 0.0);

  if (d <= 12) {
    for (SubsetId K = 1; K <= full; ++K) {
      double acc = 0.0;
      // Enumerates M over all submasks of K, including M = 0; the M = full
      // term reads val[0] = 0, matching the theta(∅) := 0 convention.
      SubsetId M = K;
      while (true) {
        const int parity = (subset_size(K) - subset_size(M)) & 1;
        const double term = val[full & ~M];
        acc += parity ? term : -term;
        if (M == 0) break;
        M = (M - 1) & K;
      }
      mw.beta[K - 1] = acc;
    }
    return mw;
  }

  std::vector<double> g(std::size_t{1} << d, 0.0);
  for (SubsetId M = 1; M <= full; ++M) g[M] = val[full] - val[full & ~M];
  for (int j = 0; j < d; ++j) {
    const SubsetId bit = SubsetId{1} << j;
    for (SubsetId M = 1; M <= full; ++M)
      if (M & bit) g[M] -= g[M ^ bit];
  }
  for (SubsetId K = 1; K <= full; ++K) mw.beta[K - 1] = g[K];
  return mw;
}

// Reconstructs the complete coefficient family from Möbius weights:
// theta(J) = total mass - sum_{K ⊆ J^c} beta_K, via a subset-sum transform.
inline SubsetFamily theta_from_mobius(const MobiusWeights& mw) {
  const int d = mw.d;
  check_dimension(d);
  const SubsetId full = full_set(d);
  if (mw.beta.size() != full)
    throw InvalidInput("Möbius weight vector has wrong length");
  std::vector<double> subset_sum(std::size_t{1} << d, 0.0);
  for (SubsetId K = 1; K <= full; ++K) subset_sum[K] = mw.beta[K - 1];
  for (int j = 0; j < d; ++j) {
    const SubsetId bit = SubsetId{1} << j;
    for (SubsetId M = 1; M <= full; ++M)
      if (M & bit) subset_sum[M] += subset_sum[M ^ bit];
  }
  const double mass = subset_sum[full];
  SubsetFamily theta(d);
  for (SubsetId J = 1; J <= full; ++J)
    theta.add(J, mass - subset_sum[full & ~J]);
  theta.finalize();
  return theta;
}

struct ConsistencyViolation {
  SubsetId inequality_at;  // the J indexing the failed inequality (0 = ∅)
  double slack;            // value of the alternating sum, negative here
};

struct ConsistencyReport {
  bool consistent = true;
  std::vector<ConsistencyViolation> violations;
  std::size_t checked = 0;  // inequalities that could be instantiated
};

// Evaluates the alternating-sum inequalities
//   sum_{L ⊇ J} (-1)^{|L\J|+1} c_J(L) >= 0  for every proper J ⊂ D (∅ too)
// and reports each failure with its slack. The sum at J equals the Möbius
// weight beta_{D\J}, so for complete families the check reduces to
// beta >= 0. For partial families only inequalities whose superset values
// are all present can be instantiated.
//
// Note the check does not require standardized margins: raw tail counts
// with c_J({j}) != 1 still satisfy every inequality, because each sum is
// an expectation of a nonnegative indicator expression.
inline ConsistencyReport check_consistency(const SubsetFamily& f,
                                           double tol = 1e-9) {
  ConsistencyReport rep;
  const SubsetId full = full_set(f.d);
  auto flag = [&](SubsetId J, double slack) {
    rep.consistent = false;
    rep.violations.push_back({J, slack});
  };

  if (f.complete()) {
    const MobiusWeights mw = mobius_weights(f);
    rep.checked = mw.beta.size();
    for (SubsetId K = 1; K <= full; ++K)
      if (mw.beta[K - 1] < -tol) flag(full & ~K, mw.beta[K - 1]);
    return rep;
  }

  // Instantiate the inequality at J only when every superset of J
  // (J itself included) carries a value.
  for (std::size_t i = 0; i < f.size(); ++i) {
    const SubsetId J = f.sets[i];
    if (J == full) continue;
    double acc = 0.0;
    bool instantiable = true;
    SubsetId L = J;
    while (true) {
      const int idx = f.index_of(L);
      if (idx < 0) {
        instantiable = false;
        break;
      }
      const int parity = subset_size(L & ~J) & 1;
      acc += parity ? f.values[static_cast<std::size_t>(idx)]
                    : -f.values[static_cast<std::size_t>(idx)];
      if (L == full) break;
      L = (L + 1) | J;
    }
    if (!instantiable) continue;
    ++rep.checked;
    if (acc < -tol) flag(J, acc);
  }
  return rep;
}

struct MonotonicityViolation {
  SubsetId subset;
  SubsetId superset;
  double gap;  // c(superset) - c(subset), negative here
};

// Reports every present pair J ⊆ K with c(J) > c(K) + tol. Complete
// families walk submasks directly (O(3^d)); sparse ones compare all pairs.
inline std::vector<MonotonicityViolation> monotonicity_check(
    const SubsetFamily& f, double tol = 1e-9) {
  std::vector<MonotonicityViolation> out;
  if (f.complete()) {
    const auto val = detail::value_table(f);
    const SubsetId full = full_set(f.d);
    for (SubsetId K = 1; K <= full; ++K)
      for (SubsetId J = (K - 1) & K; J != 0; J = (J - 1) & K)
        if (val[J] > val[K] + tol) out.push_back({J, K, val[K] - val[J]});
    return out;
  }
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t k = 0; k < f.size(); ++k) {
      const SubsetId J = f.sets[i], K = f.sets[k];
      if (J != K && (J & K) == J && f.values[i] > f.values[k] + tol)
        out.push_back({J, K, f.values[k] - f.values[i]});
    }
  return out;
}

}  // namespace xvar
