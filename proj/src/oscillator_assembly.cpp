#include "susyqm/oscillator_assembly.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <tuple>

#include "susyqm/model_operators.hpp"
#include "susyqm/potential_landscape.hpp"

namespace susyqm {

namespace {

constexpr int kBitsPerSlot = 5;

bool same_spec(const BasisSpec& a, const BasisSpec& b) {
  return a.cutoff == b.cutoff && a.unit_cutoff == b.unit_cutoff && a.frequencies == b.frequencies && a.active == b.active &&
         a.circular_planes == b.circular_planes && a.layout == b.layout;
}

std::uint64_t pack(const std::vector<std::uint8_t>& occ) {
  std::uint64_t key = 0;
  for (std::size_t s = 0; s < occ.size(); ++s) key |= std::uint64_t{occ[s]} << (kBitsPerSlot * s);
  return key;
}

bool is_plane_start(const BasisSpec& spec, int var) {
  return spec.circular_planes && (var == q_var(0) || var == q_var(2)) && spec.active[var] &&
         spec.active[var + 1];
}

// Sparse columns of one unit factor: table[local source] = (local target, value).
using UnitTable = std::vector<std::vector<std::pair<int, cd>>>;

Eigen::MatrixXcd lowering(int size) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(size, size);
  for (int n = 1; n < size; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Eigen::MatrixXcd power(const Eigen::MatrixXcd& m, int e) {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  for (int i = 0; i < e; ++i) r = r * m;
  return r;
}

double drop_threshold(const Eigen::MatrixXcd& m) { return 1e-14 * (1.0 + m.cwiseAbs().maxCoeff()); }

UnitTable cartesian_table(int c, int b, double w, int cutoff) {
  const int size = cutoff + c + b + 1;
  const Eigen::MatrixXcd a = lowering(size);
  const Eigen::MatrixXcd ad = a.adjoint();
  const Eigen::MatrixXcd q = (a + ad) / std::sqrt(2.0 * w);
  const Eigen::MatrixXcd p = cd(0.0, std::sqrt(w / 2.0)) * (ad - a);
  const Eigen::MatrixXcd m = power(q, c) * power(p, b);
  const double tol = drop_threshold(m);
  UnitTable table(static_cast<std::size_t>(cutoff + 1));
  for (int n = 0; n <= cutoff; ++n)
    for (int r = 0; r <= cutoff; ++r)
      if (std::abs(m(r, n)) > tol) table[n].emplace_back(r, m(r, n));
  return table;
}

// Plane local index: n_plus * (cutoff + 1) + n_minus.
UnitTable plane_table(int a1, int a2, int b1, int b2, double w, int cutoff) {
  const int box = cutoff + a1 + a2 + b1 + b2 + 1;
  const Eigen::MatrixXcd a = lowering(box);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(box, box);
  const auto kron = [&](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
    Eigen::MatrixXcd r(box * box, box * box);
    for (int i = 0; i < box; ++i)
      for (int j = 0; j < box; ++j) r.block(i * box, j * box, box, box) = x(i, j) * y;
    return r;
  };
  const Eigen::MatrixXcd ap = kron(a, id);
  const Eigen::MatrixXcd am = kron(id, a);
  const double s = 1.0 / std::sqrt(2.0);
  const Eigen::MatrixXcd c1 = s * (ap + am);
  const Eigen::MatrixXcd c2 = cd(0.0, s) * (ap - am);
  const auto pos = [&](const Eigen::MatrixXcd& l) -> Eigen::MatrixXcd {
    return (l + l.adjoint()) / std::sqrt(2.0 * w);
  };
  const auto mom = [&](const Eigen::MatrixXcd& l) -> Eigen::MatrixXcd {
    return cd(0.0, std::sqrt(w / 2.0)) * (l.adjoint() - l);
  };
  const Eigen::MatrixXcd m =
      power(pos(c1), a1) * power(pos(c2), a2) * power(mom(c1), b1) * power(mom(c2), b2);
  const double tol = drop_threshold(m);
  const int stride = cutoff + 1;
  UnitTable table(static_cast<std::size_t>(stride * stride));
  for (int np = 0; np <= cutoff; ++np)
    for (int nm = 0; np + nm <= cutoff; ++nm)
      for (int rp = 0; rp <= cutoff; ++rp)
        for (int rm = 0; rp + rm <= cutoff; ++rm) {
          const cd v = m(rp * box + rm, np * box + nm);
          if (std::abs(v) > tol) table[np * stride + nm].emplace_back(rp * stride + rm, v);
        }
  return table;
}

// Column lists of a Clifford element with zero scalar part.
std::vector<std::vector<std::pair<std::uint16_t, cd>>> fermion_columns(
    const CliffordElement<cd>& e, FermionLayout layout) {
  std::vector<std::map<std::uint16_t, cd>> acc(kFermionDim);
  for (const auto& [mask, c] : e.terms()) {
    const MonomialAction act = monomial_action(mask, layout);
    for (int f = 0; f < kFermionDim; ++f) acc[f][static_cast<std::uint16_t>(f ^ act.flip)] +=
        c * act.phase[f];
  }
  std::vector<std::vector<std::pair<std::uint16_t, cd>>> cols(kFermionDim);
  for (int f = 0; f < kFermionDim; ++f)
    for (const auto& [r, v] : acc[f])
      if (std::abs(v) > 1e-15) cols[f].emplace_back(r, v);
  return cols;
}

}  // namespace

// ---------------------------------------------------------------------------
// BasisSpec

int BasisSpec::max_quanta() const {
  int m = cutoff;
  for (int v = 0; v < kNumBosons; ++v)
    if (active[v]) m = std::max(m, unit_cutoff[v]);
  return m;
}

bool BasisSpec::include_x() const {
  for (int mu = 0; mu < 5; ++mu)
    if (active[x_var(mu)]) return true;
  return false;
}

void BasisSpec::validate() const {
  if (cutoff < 0) throw std::invalid_argument("BasisSpec: cutoff must be >= 0");
  if (max_quanta() >= (1 << kBitsPerSlot))
    throw std::invalid_argument("BasisSpec: cutoff too large");
  for (int v = 0; v < kNumBosons; ++v)
    if (unit_cutoff[v] < -1) throw std::invalid_argument("BasisSpec: unit cutoff must be >= -1");
  for (int v = 0; v < kNumBosons; ++v)
    if (active[v] && !(frequencies[v] > 0.0))
      throw std::invalid_argument("BasisSpec: frequencies must be positive");
  if (circular_planes)
    for (int v : {q_var(0), q_var(2)})
      if (active[v] && active[v + 1] && frequencies[v] != frequencies[v + 1])
        throw std::invalid_argument("BasisSpec: a circular plane needs equal frequencies");
  if (circular_planes)
    for (int v : {q_var(0), q_var(2)})
      if (active[v] && active[v + 1] && unit_cutoff[v] != unit_cutoff[v + 1])
        throw std::invalid_argument("BasisSpec: a circular plane needs one unit cutoff");
}

BasisSpec full_model_spec(int cutoff, double w12, double w34, double wx) {
  BasisSpec s;
  s.cutoff = cutoff;
  s.active.fill(true);
  s.frequencies = {w12, w12, w34, w34, wx, wx, wx, wx, wx};
  s.circular_planes = true;
  s.layout = FermionLayout::Charge;
  return s;
}

BasisSpec fiber_spec(int cutoff, double w, bool circular_planes) {
  BasisSpec s;
  s.cutoff = cutoff;
  for (int j = 0; j < 4; ++j) {
    s.active[q_var(j)] = true;
    s.frequencies[q_var(j)] = w;
  }
  s.circular_planes = circular_planes;
  s.layout = FermionLayout::Charge;
  return s;
}

BasisSpec slice_spec(int cutoff, double w) {
  BasisSpec s;
  s.cutoff = cutoff;
  for (int v = 1; v < kNumBosons; ++v) {
    s.active[v] = true;
    s.frequencies[v] = w;
  }
  s.circular_planes = false;
  s.layout = FermionLayout::Canonical;
  return s;
}

// ---------------------------------------------------------------------------
// SectorBasis

SectorBasis::SectorBasis(const BasisSpec& spec, const SectorFilter& filter)
    : spec_(spec), filter_(filter) {
  spec_.validate();
  if (filter.parity && *filter.parity != 1 && *filter.parity != -1)
    throw std::invalid_argument("SectorBasis: parity must be +1 or -1");
  if (filter.quanta && *filter.quanta < 0)
    throw std::invalid_argument("SectorBasis: quanta filter must be >= 0");

  for (int v = 0; v < kNumBosons; ++v) {
    if (!spec_.active[v]) continue;
    if (is_plane_start(spec_, v)) {
      units_.push_back({true, v, v + 1});
      slots_ += 2;
      ++v;
    } else {
      units_.push_back({false, v, v});
      slots_ += 1;
    }
  }
  bool has_planes = false;
  for (const auto& u : units_) has_planes |= u.plane;
  if (filter.gauge) {
    if (!has_planes || units_.empty() || !spec_.active[0] || !spec_.active[2])
      throw std::invalid_argument("SectorBasis: the gauge sector needs both circular q-planes");
    if (spec_.layout != FermionLayout::Charge)
      throw std::invalid_argument("SectorBasis: the gauge sector needs the charge layout");
  }

  // Fermion quantum numbers.
  const FermionMatrix parity = fermion_parity(spec_.layout);
  for (int f = 0; f < kFermionDim; ++f) {
    const double v = parity(f, f).to_complex().real();
    parity_[f] = v > 0 ? 1 : -1;
  }
  if (spec_.layout == FermionLayout::Charge) {
    const FermionMatrix m = spin_part_M(FermionLayout::Charge);
    for (int f = 0; f < kFermionDim; ++f)
      m_charge_[f] = static_cast<int>(std::lround(m(f, f).to_complex().real()));
  }

  // Boson states: shared units have total <= N, units with their own cutoff
  // are bounded separately; ordered by total then lexicographically.
  std::vector<int> slot_cutoff;  // own cutoff of the slot's unit, -1 if shared
  std::vector<bool> slot_first;
  for (const auto& u : units_) {
    const int own = spec_.unit_cutoff[u.var];
    for (int k = 0; k < (u.plane ? 2 : 1); ++k) {
      slot_cutoff.push_back(own);
      slot_first.push_back(k == 0);
    }
  }
  std::vector<std::uint8_t> occ(slots_, 0);
  std::function<void(std::size_t, int, int)> rec = [&](std::size_t slot, int shared, int own) {
    if (slot == slots_) {
      occupations_.push_back(occ);
      return;
    }
    if (slot_cutoff[slot] >= 0 && slot_first[slot]) own = slot_cutoff[slot];
    const int left = slot_cutoff[slot] >= 0 ? own : shared;
    for (int n = 0; n <= left; ++n) {
      occ[slot] = static_cast<std::uint8_t>(n);
      if (slot_cutoff[slot] >= 0)
        rec(slot + 1, shared, own - n);
      else
        rec(slot + 1, shared - n, own);
    }
    occ[slot] = 0;
  };
  rec(0, spec_.cutoff, 0);
  const auto total = [](const std::vector<std::uint8_t>& o) {
    int t = 0;
    for (auto n : o) t += n;
    return t;
  };
  std::stable_sort(occupations_.begin(), occupations_.end(),
                   [&](const auto& a, const auto& b) { return total(a) < total(b); });
  if (filter.quanta)
    std::erase_if(occupations_, [&](const auto& o) { return total(o) != *filter.quanta; });

  const std::size_t nb = occupations_.size();
  quanta_.resize(nb);
  charge_.resize(nb);
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    quanta_[b] = total(occupations_[b]);
    int charge = 0;
    std::size_t slot = 0;
    for (const auto& u : units_) {
      if (u.plane) {
        charge += occupations_[b][slot] - occupations_[b][slot + 1];
        slot += 2;
      } else {
        slot += 1;
      }
    }
    charge_[b] = charge;
    keyed[b] = {pack(occupations_[b]), static_cast<std::uint32_t>(b)};
  }
  std::sort(keyed.begin(), keyed.end());
  keys_.resize(nb);
  key_index_.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) std::tie(keys_[i], key_index_[i]) = keyed[i];

  // Fermion classes: one per boson charge under the gauge filter, else one.
  std::map<int, int> class_id;
  class_of_.resize(nb);
  offsets_.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const int key = filter.gauge ? charge_[b] : 0;
    auto [it, inserted] = class_id.try_emplace(key, static_cast<int>(class_fermions_.size()));
    if (inserted) {
      std::vector<std::uint16_t> list;
      std::array<std::int16_t, kFermionDim> pos{};
      pos.fill(-1);
      for (int f = 0; f < kFermionDim; ++f) {
        if (filter.parity && parity_[f] != *filter.parity) continue;
        if (filter.gauge && m_charge_[f] != -key) continue;
        pos[f] = static_cast<std::int16_t>(list.size());
        list.push_back(static_cast<std::uint16_t>(f));
      }
      class_fermions_.push_back(std::move(list));
      class_position_.push_back(pos);
    }
    class_of_[b] = it->second;
    offsets_[b] = dim_;
    dim_ += class_fermions_[it->second].size();
  }
}

long SectorBasis::find_boson(const std::vector<std::uint8_t>& occ) const {
  int t = 0;
  for (auto n : occ) t += n;
  if (occ.size() != slots_) return -1;
  if (filter_.quanta && t != *filter_.quanta) return -1;
  const std::uint64_t key = pack(occ);
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return -1;
  return key_index_[static_cast<std::size_t>(it - keys_.begin())];
}

const std::vector<std::uint16_t>& SectorBasis::fermions(std::size_t b) const {
  return class_fermions_[class_of_[b]];
}

int SectorBasis::fermion_position(std::size_t b, int f) const {
  return class_position_[class_of_[b]][f];
}

// ---------------------------------------------------------------------------
// NumericPolynomial

NumericPolynomial::NumericPolynomial(const OperatorPolynomial& p, cd scale, double k) {
  add(p, scale, k);
}

void NumericPolynomial::add(const OperatorPolynomial& p, cd scale, double k) {
  for (const auto& [m, c] : p.terms()) {
    WeylMonomial mono = m;
    const cd factor = scale * std::pow(k, static_cast<int>(m.k));
    mono.k = 0;
    Coefficient& dst = terms_[mono];
    for (const auto& [mask, v] : c.terms()) dst.add_term(mask, factor * v.to_complex());
    if (dst.is_zero()) terms_.erase(mono);
  }
}

void NumericPolynomial::add(const NumericPolynomial& p, cd scale) {
  for (const auto& [m, c] : p.terms()) {
    Coefficient& dst = terms_[m];
    for (const auto& [mask, v] : c.terms()) dst.add_term(mask, scale * v);
    if (dst.is_zero()) terms_.erase(m);
  }
}

NumericPolynomial NumericPolynomial::substitute(int var, double value) const {
  NumericPolynomial out;
  for (const auto& [m, c] : terms_) {
    if (m.mom[var] != 0)
      throw std::invalid_argument("NumericPolynomial::substitute: momentum of a fixed variable");
    WeylMonomial mono = m;
    const double factor = std::pow(value, static_cast<int>(m.pos[var]));
    mono.pos[var] = 0;
    Coefficient& dst = out.terms_[mono];
    for (const auto& [mask, v] : c.terms()) dst.add_term(mask, factor * v);
    if (dst.is_zero()) out.terms_.erase(mono);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SparseOperator

SparseOperator::SparseOperator(const NumericPolynomial& poly, std::shared_ptr<const SectorBasis> in,
                               std::shared_ptr<const SectorBasis> out, std::string label,
                               bool symmetric)
    : label_(std::move(label)), symmetric_(symmetric), in_(std::move(in)), out_(std::move(out)) {
  if (!out_) out_ = in_;
  if (!same_spec(in_->spec(), out_->spec()))
    throw std::invalid_argument("SparseOperator: input and output bases differ in spec");
  const BasisSpec& spec = in_->spec();
  const int cutoff = spec.max_quanta();
  const auto& units = in_->units();

  struct CompiledTerm {
    cd scalar = 0.0;
    int fermion_id = -1;
    std::vector<const UnitTable*> factors;  // per unit, nullptr = identity
  };
  std::map<std::vector<int>, UnitTable> cache;
  std::vector<CompiledTerm> terms;
  for (const auto& [mono, coeff] : poly.terms()) {
    for (int v = 0; v < kNumBosons; ++v)
      if (!spec.active[v] && (mono.pos[v] != 0 || mono.mom[v] != 0))
        throw std::invalid_argument("SparseOperator: term uses a variable without oscillator");
    CompiledTerm t;
    t.scalar = coeff.coefficient(0);
    CliffordElement<cd> rest;
    for (const auto& [mask, v] : coeff.terms())
      if (mask != 0) rest.add_term(mask, v);
    if (!rest.is_zero()) {
      t.fermion_id = static_cast<int>(columns_.size());
      columns_.push_back(fermion_columns(rest, spec.layout));
    }
    for (std::size_t u = 0; u < units.size(); ++u) {
      const BosonUnit& unit = units[u];
      std::vector<int> key;
      if (unit.plane) {
        key = {static_cast<int>(u), mono.pos[unit.var], mono.pos[unit.var2], mono.mom[unit.var],
               mono.mom[unit.var2]};
      } else {
        key = {static_cast<int>(u), mono.pos[unit.var], mono.mom[unit.var]};
      }
      bool trivial = true;
      for (std::size_t i = 1; i < key.size(); ++i) trivial &= key[i] == 0;
      if (trivial) {
        t.factors.push_back(nullptr);
        continue;
      }
      auto it = cache.find(key);
      if (it == cache.end()) {
        const double w = spec.frequencies[unit.var];
        UnitTable table = unit.plane
                              ? plane_table(key[1], key[2], key[3], key[4], w, cutoff)
                              : cartesian_table(key[1], key[2], w, cutoff);
        it = cache.emplace(key, std::move(table)).first;
      }
      t.factors.push_back(&it->second);
    }
    terms.push_back(std::move(t));
  }

  // Slot offsets and local indices of the units.
  std::vector<std::size_t> slot_of(units.size());
  {
    std::size_t s = 0;
    for (std::size_t u = 0; u < units.size(); ++u) {
      slot_of[u] = s;
      s += units[u].plane ? 2 : 1;
    }
  }
  const int stride = cutoff + 1;

  const std::size_t nb = in_->boson_dim();
  row_start_.reserve(nb + 1);
  row_start_.push_back(0);
  fterm_start_.push_back(0);
  struct Acc {
    cd scalar = 0.0;
    std::map<std::uint32_t, cd> fermion;
  };
  std::vector<std::pair<std::vector<std::uint8_t>, cd>> partial, next;
  for (std::size_t b = 0; b < nb; ++b) {
    std::map<std::uint32_t, Acc> acc;
    const auto& occ = in_->occupations(b);
    for (const CompiledTerm& t : terms) {
      partial.assign(1, {occ, cd(1.0)});
      for (std::size_t u = 0; u < units.size() && !partial.empty(); ++u) {
        const UnitTable* table = t.factors[u];
        if (!table) continue;
        const std::size_t s = slot_of[u];
        next.clear();
        for (const auto& [o, c] : partial) {
          const int local = units[u].plane ? o[s] * stride + o[s + 1] : o[s];
          for (const auto& [target, v] : (*table)[local]) {
            auto o2 = o;
            if (units[u].plane) {
              o2[s] = static_cast<std::uint8_t>(target / stride);
              o2[s + 1] = static_cast<std::uint8_t>(target % stride);
            } else {
              o2[s] = static_cast<std::uint8_t>(target);
            }
            next.emplace_back(std::move(o2), c * v);
          }
        }
        partial.swap(next);
      }
      for (const auto& [o, c] : partial) {
        const long target = in_->find_boson(o);
        if (target < 0) continue;
        Acc& a = acc[static_cast<std::uint32_t>(target)];
        if (t.scalar != 0.0) a.scalar += c * t.scalar;
        if (t.fermion_id >= 0) a.fermion[static_cast<std::uint32_t>(t.fermion_id)] += c;
      }
    }
    double scale = 0.0;
    for (const auto& [target, a] : acc) {
      scale = std::max(scale, std::abs(a.scalar));
      for (const auto& [id, c] : a.fermion) scale = std::max(scale, std::abs(c));
    }
    const double tol = 1e-13 * scale;
    for (const auto& [target, a] : acc) {
      const bool keep_scalar = std::abs(a.scalar) > tol;
      std::size_t kept = 0;
      for (const auto& [id, c] : a.fermion)
        if (std::abs(c) > tol) {
          fterms_.push_back({id, c});
          ++kept;
        }
      if (!keep_scalar && kept == 0) continue;
      targets_.push_back(target);
      scalars_.push_back(keep_scalar ? a.scalar : cd(0.0));
      fterm_start_.push_back(fterms_.size());
    }
    row_start_.push_back(targets_.size());
  }
}

void SparseOperator::apply(const cd* x, cd* y) const {
  const SectorBasis& in = *in_;
  const SectorBasis& out = *out_;
  std::fill(y, y + out.dim(), cd(0.0));
  const bool same_basis = in_.get() == out_.get();
  const std::size_t nb = in.boson_dim();
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& src = in.fermions(b);
    const std::size_t nsrc = src.size();
    if (nsrc == 0) continue;
    const cd* xs = x + in.offset(b);
    for (std::size_t e = row_start_[b]; e < row_start_[b + 1]; ++e) {
      const std::uint32_t tau = targets_[e];
      const auto& dst = out.fermions(tau);
      if (dst.empty()) continue;
      cd* ys = y + out.offset(tau);
      const cd a = scalars_[e];
      if (a != 0.0) {
        if (same_basis && &dst == &src) {
          for (std::size_t i = 0; i < nsrc; ++i) ys[i] += a * xs[i];
        } else {
          for (std::size_t i = 0; i < nsrc; ++i) {
            const int p = out.fermion_position(tau, src[i]);
            if (p >= 0) ys[p] += a * xs[i];
          }
        }
      }
      for (std::size_t k = fterm_start_[e]; k < fterm_start_[e + 1]; ++k) {
        const auto& cols = columns_[fterms_[k].id];
        const cd c = fterms_[k].coeff;
        for (std::size_t i = 0; i < nsrc; ++i) {
          const cd cx = c * xs[i];
          for (const auto& [r, v] : cols[src[i]]) {
            const int p = out.fermion_position(tau, r);
            if (p >= 0) ys[p] += v * cx;
          }
        }
      }
    }
  }
}

Eigen::VectorXcd SparseOperator::apply(const Eigen::VectorXcd& x) const {
  if (static_cast<std::size_t>(x.size()) != in_->dim())
    throw std::invalid_argument("SparseOperator::apply: dimension mismatch");
  Eigen::VectorXcd y(static_cast<Eigen::Index>(out_->dim()));
  apply(x.data(), y.data());
  return y;
}

double symmetry_defect(const SparseOperator& op, int pairs, std::uint64_t seed) {
  if (op.in_ptr() != op.out_ptr() && op.in().dim() != op.out().dim())
    throw std::invalid_argument("symmetry_defect: operator is not square");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const auto n = static_cast<Eigen::Index>(op.in().dim());
  double worst = 0.0;
  for (int i = 0; i < pairs; ++i) {
    Eigen::VectorXcd u(n), v(n);
    for (Eigen::Index j = 0; j < n; ++j) u(j) = cd(g(rng), g(rng));
    for (Eigen::Index j = 0; j < n; ++j) v(j) = cd(g(rng), g(rng));
    const cd lhs = u.dot(op.apply(v));
    const cd rhs = op.apply(u).dot(v);
    worst = std::max(worst, std::abs(lhs - rhs) / (u.norm() * v.norm()));
  }
  return worst;
}

Eigen::VectorXcd embed(const SectorBasis& from, const SectorBasis& to, const Eigen::VectorXcd& v) {
  if (!same_spec(from.spec(), to.spec())) throw std::invalid_argument("embed: specs differ");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(to.dim()));
  for (std::size_t b = 0; b < from.boson_dim(); ++b) {
    const auto& fs = from.fermions(b);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const int p = to.fermion_position(b, fs[i]);
      if (p < 0) throw std::invalid_argument("embed: target basis is not larger");
      out(static_cast<Eigen::Index>(to.offset(b)) + p) =
          v(static_cast<Eigen::Index>(from.offset(b) + i));
    }
  }
  return out;
}

Eigen::VectorXcd restrict_to(const SectorBasis& from, const SectorBasis& to,
                             const Eigen::VectorXcd& v) {
  if (!same_spec(from.spec(), to.spec())) throw std::invalid_argument("restrict_to: specs differ");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(to.dim()));
  for (std::size_t b = 0; b < to.boson_dim(); ++b) {
    const auto& fs = to.fermions(b);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const int p = from.fermion_position(b, fs[i]);
      if (p >= 0)
        out(static_cast<Eigen::Index>(to.offset(b) + i)) =
            v(static_cast<Eigen::Index>(from.offset(b)) + p);
    }
  }
  return out;
}

double sector_leakage(const SparseOperator& op_full_out, const SectorBasis& sector,
                      const Eigen::VectorXcd& v) {
  const Eigen::VectorXcd w = op_full_out.apply(v);
  const Eigen::VectorXcd inside = restrict_to(op_full_out.out(), sector, w);
  const double total = w.squaredNorm();
  return std::sqrt(std::max(0.0, total - inside.squaredNorm()));
}

// ---------------------------------------------------------------------------
// Model operators

BosonOps build_boson_ops(std::shared_ptr<const SectorBasis> basis) {
  BosonOps ops;
  const BasisSpec& spec = basis->spec();
  for (int v = 0; v < kNumBosons; ++v) {
    if (!spec.active[v]) continue;
    ops.vars.push_back(v);
    const std::string name = v < 4 ? "q" + std::to_string(v + 1) : "x" + std::to_string(v - 3);
    ops.q.emplace_back(NumericPolynomial(OperatorPolynomial::position(v)), basis, basis, name,
                       true);
    ops.p.emplace_back(NumericPolynomial(OperatorPolynomial::momentum(v)), basis, basis,
                       "p_" + name, true);
  }
  const auto w = [&](int i, int j) {
    return OperatorPolynomial::position(i) * OperatorPolynomial::momentum(j) -
           OperatorPolynomial::position(j) * OperatorPolynomial::momentum(i);
  };
  if (spec.active[0] && spec.active[1])
    ops.W12.emplace(NumericPolynomial(w(0, 1)), basis, basis, "W12", true);
  if (spec.active[2] && spec.active[3])
    ops.W34.emplace(NumericPolynomial(w(2, 3)), basis, basis, "W34", true);
  return ops;
}

std::shared_ptr<const SectorBasis> build_gauge_sector(const BasisSpec& spec,
                                                      std::optional<int> parity) {
  return std::make_shared<const SectorBasis>(spec, SectorFilter{true, parity, std::nullopt});
}

OperatorPolynomial kinetic_polynomial(bool include_x) {
  OperatorPolynomial r;
  for (int j = 0; j < 4; ++j) r += p_q(j) * p_q(j);
  if (include_x)
    for (int mu = 0; mu < 5; ++mu) r += p_x(mu) * p_x(mu);
  return r;
}

namespace {
OperatorPolynomial hf_filtered(bool x_terms) {
  OperatorPolynomial r;
  for (const auto& [m, c] : model_operators().gh.HF.terms()) {
    bool has_x = false;
    for (int mu = 0; mu < 5; ++mu) has_x |= m.pos[x_var(mu)] != 0;
    if (has_x == x_terms) r.add_term(m, c);
  }
  return r;
}
}  // namespace

OperatorPolynomial hf_x_part() { return hf_filtered(true); }
OperatorPolynomial hf_q_part() { return hf_filtered(false); }

double matched_frequency_Kt(double t) { return std::sqrt(2.0) * t; }

double matched_frequency_fiber(const std::array<double, 5>& x) {
  double n = 0.0;
  for (double v : x) n += v * v;
  return std::sqrt(n);
}

SparseOperator assemble_Kt(double t, std::shared_ptr<const SectorBasis> in,
                           std::shared_ptr<const SectorBasis> out) {
  NumericPolynomial poly(kinetic_polynomial(true));
  poly.add(potential_polynomial(PotentialVariant::V1), t * t);
  poly.add(model_operators().gh.HF, t);
  const bool sym = !out || out == in;
  return SparseOperator(poly, in, out ? out : in, "K_t(t=" + std::to_string(t) + ")", sym);
}

SparseOperator assemble_Kt_without_hf(double t, std::shared_ptr<const SectorBasis> in) {
  NumericPolynomial poly(kinetic_polynomial(true));
  poly.add(potential_polynomial(PotentialVariant::V1), t * t);
  return SparseOperator(poly, in, in, "K_t without H_F(t=" + std::to_string(t) + ")", true);
}

SparseOperator assemble_Hk(double k, std::shared_ptr<const SectorBasis> in,
                           std::shared_ptr<const SectorBasis> out) {
  NumericPolynomial poly(kinetic_polynomial(true));
  poly.add(potential_polynomial(PotentialVariant::Vk), 1.0, k);
  poly.add(model_operators().gh.HF);
  const bool sym = !out || out == in;
  return SparseOperator(poly, in, out ? out : in, "H_k(k=" + std::to_string(k) + ")", sym);
}

BasisSpec scaling_link(double t, const BasisSpec& kt_spec) {
  if (!(t > 0.0)) throw std::invalid_argument("scaling_link: t must be positive");
  BasisSpec s = kt_spec;
  const double f = std::pow(t, -2.0 / 3.0);
  for (double& w : s.frequencies) w *= f;
  return s;
}

SparseOperator assemble_fiber(double k, const std::array<double, 5>& x,
                              std::shared_ptr<const SectorBasis> basis, bool free_part_only,
                              std::shared_ptr<const SectorBasis> out) {
  if (basis->spec().include_x())
    throw std::invalid_argument("assemble_fiber: the fiber basis must not contain x-modes");
  NumericPolynomial poly(kinetic_polynomial(false));
  if (free_part_only) {
    OperatorPolynomial nq, nx;
    for (int j = 0; j < 4; ++j) nq += q(j) * q(j);
    for (int mu = 0; mu < 5; ++mu) nx += ::susyqm::x(mu) * ::susyqm::x(mu);
    poly.add(nx * nq);
    poly.add(hf_x_part());
  } else {
    poly.add(potential_polynomial(PotentialVariant::Vk), 1.0, k);
    poly.add(model_operators().gh.HF);
  }
  for (int mu = 0; mu < 5; ++mu) poly = poly.substitute(x_var(mu), x[mu]);
  std::string label = free_part_only ? "H0_x" : "H_k,x(k=" + std::to_string(k) + ")";
  const bool sym = !out || out == basis;
  return SparseOperator(poly, basis, out ? out : basis, label, sym);
}

SparseOperator assemble_Gt(double t, std::shared_ptr<const SectorBasis> basis) {
  if (!(t > 0.0)) throw std::invalid_argument("assemble_Gt: t must be positive");
  const BasisSpec& spec = basis->spec();
  if (spec.active[0]) throw std::invalid_argument("assemble_Gt: q1 is fixed on the slice");
  for (int v = 1; v < kNumBosons; ++v)
    if (!spec.active[v]) throw std::invalid_argument("assemble_Gt: slice basis needs 8 modes");

  NumericPolynomial poly;
  for (int v = 1; v < kNumBosons; ++v)
    poly.add(OperatorPolynomial::momentum(v) * OperatorPolynomial::momentum(v));
  const QuadraticModel model = quadratic_model();
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b)
      if (model.hessian(a, b) != 0.0)
        poly.add(OperatorPolynomial::position(a + 1) * OperatorPolynomial::position(b + 1),
                 0.5 * t * t * model.hessian(a, b));
  // H_F at eta0 = (q1, q2) = (0, sqrt2), exactly.
  std::array<ExactScalar, kNumBosons> at{};
  at[q_var(1)] = ExactScalar::sqrt2();
  poly.add(OperatorPolynomial(model_operators().gh.HF.evaluate(at)), t);
  return SparseOperator(poly, basis, basis, "G_t(t=" + std::to_string(t) + ")", true);
}

SparseOperator assemble_Q1k(double k, std::shared_ptr<const SectorBasis> in,
                            std::shared_ptr<const SectorBasis> out) {
  NumericPolynomial poly(model_operators().Q[0]);
  poly.add(lambda(1), k);
  const bool sym = !out || out == in;
  return SparseOperator(poly, in, out ? out : in, "Q_1k(k=" + std::to_string(k) + ")", sym);
}

}  // namespace susyqm
