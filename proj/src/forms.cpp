#include "srusk/forms.hpp"

#include <bit>
#include <stdexcept>

namespace srusk {

namespace {

std::size_t index_in(const Chart& chart, Coord c) {
  int i = chart.index_of(c);
  if (i < 0) throw std::invalid_argument("coordinate " + c.name() + " not in chart");
  return static_cast<std::size_t>(i);
}

void require_same_chart(const TwoFormField& a, const TwoFormField& b) {
  if (!(a.chart == b.chart)) throw std::invalid_argument("forms live on different charts");
}

}  // namespace

OneFormField OneFormField::zero(const Chart& chart) {
  return {chart, std::vector<Expr>(chart.size())};
}

const Expr& OneFormField::at(Coord c) const { return coeffs[index_in(chart, c)]; }

TwoFormField TwoFormField::zero(const Chart& chart) {
  return {chart, std::vector<std::vector<Expr>>(chart.size(), std::vector<Expr>(chart.size()))};
}

const Expr& TwoFormField::at(Coord a, Coord b) const { return coeffs[index_in(chart, a)][index_in(chart, b)]; }

void TwoFormField::add_wedge(Coord a, Coord b, const Expr& c) {
  std::size_t i = index_in(chart, a);
  std::size_t j = index_in(chart, b);
  coeffs[i][j] = coeffs[i][j] + c;
  coeffs[j][i] = coeffs[j][i] - c;
}

TwoFormField operator+(const TwoFormField& a, const TwoFormField& b) {
  require_same_chart(a, b);
  TwoFormField out = a;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) out.coeffs[i][j] = a.coeffs[i][j] + b.coeffs[i][j];
  return out;
}

TwoFormField operator-(const TwoFormField& a, const TwoFormField& b) { return a + Expr(-1) * b; }

TwoFormField operator*(const Expr& s, const TwoFormField& a) {
  TwoFormField out = a;
  for (auto& row : out.coeffs)
    for (auto& c : row) c = s * c;
  return out;
}

OneFormField build_eta(const Chart& chart) {
  OneFormField eta = OneFormField::zero(chart);
  eta.coeffs[index_in(chart, Coord::time())] = Expr(1);
  return eta;
}

TwoFormField build_omega(int n, int sign) {
  TwoFormField w = TwoFormField::zero(Chart::mixed(n));
  for (int a = 1; a <= n; ++a) w.add_wedge(Coord::position(a), Coord::momentum(a), Expr(sign));
  w.add_wedge(Coord::time(), Coord::tau(), Expr(sign));
  return w;
}

HamiltonianFn build_hamiltonian(const SystemSpec& spec) {
  std::vector<Expr> terms{tau_(), -spec.lagrangian};
  for (int a = 1; a <= spec.n; ++a) terms.push_back(p_(a) * qd_(a));
  HamiltonianFn h;
  h.h = add(std::move(terms));
  for (int a = 1; a <= spec.n; ++a) h.dh_dqd.push_back(diff(h.h, Coord::velocity(a), spec.n));
  h.dh_dtau = diff(h.h, Coord::tau(), spec.n);
  return h;
}

TwoFormField build_omega_H(const SystemSpec& spec, int omega_sign) {
  Chart chart = Chart::mixed(spec.n);
  return build_omega(spec.n, omega_sign) + wedge(differential(build_hamiltonian(spec).h, chart), build_eta(chart));
}

PoincareCartan build_poincare_cartan(const SystemSpec& spec) {
  Chart chart = Chart::jet(spec.n);
  OneFormField theta = OneFormField::zero(chart);
  std::vector<Expr> energy_terms{spec.lagrangian};
  for (int a = 1; a <= spec.n; ++a) {
    Expr lv = diff(spec.lagrangian, Coord::velocity(a), spec.n);
    theta.coeffs[index_in(chart, Coord::position(a))] = lv;
    energy_terms.push_back(-(qd_(a) * lv));
  }
  theta.coeffs[index_in(chart, Coord::time())] = add(std::move(energy_terms));
  return {theta, Expr(-1) * exterior_derivative(theta)};
}

OneFormField differential(const Expr& f, const Chart& chart) {
  OneFormField df = OneFormField::zero(chart);
  for (std::size_t i = 0; i < chart.size(); ++i) df.coeffs[i] = diff(f, chart[i]);
  return df;
}

TwoFormField wedge(const OneFormField& a, const OneFormField& b) {
  if (!(a.chart == b.chart)) throw std::invalid_argument("forms live on different charts");
  TwoFormField out = TwoFormField::zero(a.chart);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (i != j) out.coeffs[i][j] = a.coeffs[i] * b.coeffs[j] - a.coeffs[j] * b.coeffs[i];
  return out;
}

TwoFormField exterior_derivative(const OneFormField& theta) {
  TwoFormField out = TwoFormField::zero(theta.chart);
  const Chart& c = theta.chart;
  for (std::size_t i = 0; i < theta.dim(); ++i)
    for (std::size_t j = 0; j < theta.dim(); ++j)
      if (i != j) out.coeffs[i][j] = diff(theta.coeffs[j], c[i]) - diff(theta.coeffs[i], c[j]);
  return out;
}

namespace {

// Component functions of the embedding and their Jacobian J[i][a] = d f_i / d y_a.
struct Embedding {
  std::map<Coord, Expr> subst;
  std::vector<std::vector<Expr>> jac;
};

Embedding make_embedding(const Chart& source, const Chart& target, const std::map<Coord, Expr>& embedding) {
  Embedding e;
  e.jac.assign(source.size(), std::vector<Expr>(target.size()));
  for (std::size_t i = 0; i < source.size(); ++i) {
    auto it = embedding.find(source[i]);
    Expr f = it != embedding.end() ? it->second : var(source[i]);
    if (it != embedding.end()) e.subst[source[i]] = f;
    for (std::size_t a = 0; a < target.size(); ++a) e.jac[i][a] = diff(f, target[a]);
  }
  return e;
}

}  // namespace

TwoFormField pullback(const TwoFormField& form, const Chart& target, const std::map<Coord, Expr>& embedding) {
  Embedding e = make_embedding(form.chart, target, embedding);
  std::vector<std::vector<Expr>> moved(form.dim(), std::vector<Expr>(form.dim()));
  for (std::size_t i = 0; i < form.dim(); ++i)
    for (std::size_t j = 0; j < form.dim(); ++j)
      if (!form.coeffs[i][j].is_zero_constant()) moved[i][j] = substitute(form.coeffs[i][j], e.subst);

  TwoFormField out = TwoFormField::zero(target);
  for (std::size_t a = 0; a < target.size(); ++a) {
    for (std::size_t b = 0; b < target.size(); ++b) {
      if (a == b) continue;
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < form.dim(); ++i) {
        if (e.jac[i][a].is_zero_constant()) continue;
        for (std::size_t j = 0; j < form.dim(); ++j) {
          if (moved[i][j].is_zero_constant() || e.jac[j][b].is_zero_constant()) continue;
          terms.push_back(moved[i][j] * e.jac[i][a] * e.jac[j][b]);
        }
      }
      out.coeffs[a][b] = add(std::move(terms));
    }
  }
  return out;
}

OneFormField pullback(const OneFormField& form, const Chart& target, const std::map<Coord, Expr>& embedding) {
  Embedding e = make_embedding(form.chart, target, embedding);
  OneFormField out = OneFormField::zero(target);
  for (std::size_t a = 0; a < target.size(); ++a) {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < form.dim(); ++i)
      if (!e.jac[i][a].is_zero_constant() && !form.coeffs[i].is_zero_constant())
        terms.push_back(substitute(form.coeffs[i], e.subst) * e.jac[i][a]);
    out.coeffs[a] = add(std::move(terms));
  }
  return out;
}

TwoFormField pullback_omega_L(const SystemSpec& spec) {
  return pullback(build_poincare_cartan(spec).omega, Chart::mixed(spec.n), {});
}

TwoFormField substitute(const TwoFormField& form, const std::map<Coord, Expr>& replacements) {
  TwoFormField out = form;
  for (auto& row : out.coeffs)
    for (auto& c : row) c = substitute(c, replacements);
  return out;
}

std::vector<Expr> interior(const std::vector<Expr>& v, const TwoFormField& form) {
  if (v.size() != form.dim()) throw std::invalid_argument("vector and form dimensions differ");
  std::vector<Expr> out(form.dim());
  for (std::size_t j = 0; j < form.dim(); ++j) {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < form.dim(); ++i)
      if (!v[i].is_zero_constant() && !form.coeffs[i][j].is_zero_constant()) terms.push_back(v[i] * form.coeffs[i][j]);
    out[j] = add(std::move(terms));
  }
  return out;
}

Expr interior(const std::vector<Expr>& v, const OneFormField& form) {
  if (v.size() != form.dim()) throw std::invalid_argument("vector and form dimensions differ");
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < form.dim(); ++i) terms.push_back(v[i] * form.coeffs[i]);
  return add(std::move(terms));
}

Eigen::MatrixXd evaluate(const TwoFormField& form, const Point& point) {
  auto d = static_cast<Eigen::Index>(form.dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const Expr& c = form.coeffs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (!c.is_zero_constant()) m(i, j) = eval(c, point);
    }
  return m;
}

Eigen::VectorXd evaluate(const OneFormField& form, const Point& point) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(form.dim()));
  for (std::size_t i = 0; i < form.dim(); ++i) v(static_cast<Eigen::Index>(i)) = eval(form.coeffs[i], point);
  return v;
}

int numeric_rank(const Eigen::MatrixXd& m, double rel_tol, double abs_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0) && s(i) > abs_tol) ++r;
  return r;
}

int rank_at(const TwoFormField& form, const Point& point) { return numeric_rank(evaluate(form, point)); }

bool is_antisymmetric(const TwoFormField& form, const ZeroTestOptions& options) {
  for (std::size_t i = 0; i < form.dim(); ++i)
    for (std::size_t j = i; j < form.dim(); ++j)
      if (!is_zero(form.coeffs[i][j] + form.coeffs[j][i], options)) return false;
  return true;
}

KForm KForm::scalar(int dim, const Expr& value) {
  KForm k(dim, 0);
  k.accumulate(0, value);
  return k;
}

KForm KForm::from(const OneFormField& form) {
  KForm k(static_cast<int>(form.dim()), 1);
  for (std::size_t i = 0; i < form.dim(); ++i) k.accumulate(std::uint64_t{1} << i, form.coeffs[i]);
  return k;
}

KForm KForm::from(const TwoFormField& form) {
  KForm k(static_cast<int>(form.dim()), 2);
  for (std::size_t i = 0; i < form.dim(); ++i)
    for (std::size_t j = i + 1; j < form.dim(); ++j)
      k.accumulate((std::uint64_t{1} << i) | (std::uint64_t{1} << j), form.coeffs[i][j]);
  return k;
}

void KForm::accumulate(std::uint64_t mask, const Expr& c) {
  if (c.is_zero_constant()) return;
  auto it = terms_.find(mask);
  if (it == terms_.end()) {
    terms_.emplace(mask, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero_constant()) terms_.erase(it);
}

Expr KForm::coefficient(const std::vector<int>& indices) const {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0 && indices[i] <= indices[i - 1]) throw std::invalid_argument("indices must be strictly ascending");
    mask |= std::uint64_t{1} << indices[i];
  }
  auto it = terms_.find(mask);
  return it == terms_.end() ? Expr(0) : it->second;
}

KForm KForm::wedge(const KForm& other) const {
  if (dim_ != other.dim_) throw std::invalid_argument("forms of different dimension");
  KForm out(dim_, degree_ + other.degree_);
  if (out.degree_ > dim_) return out;
  for (const auto& [a, ca] : terms_) {
    for (const auto& [b, cb] : other.terms_) {
      if (a & b) continue;
      // Sign of sorting dx^A ^ dx^B: one transposition per pair i in A, j in B with i > j.
      int inversions = 0;
      for (std::uint64_t rest = b; rest; rest &= rest - 1) {
        int j = std::countr_zero(rest);
        inversions += std::popcount(a >> (j + 1));
      }
      Expr c = ca * cb;
      out.accumulate(a | b, inversions % 2 ? -c : c);
    }
  }
  return out;
}

KForm KForm::power(int k) const {
  if (k < 0) throw std::invalid_argument("negative wedge power");
  KForm out = scalar(dim_, Expr(1));
  for (int i = 0; i < k; ++i) out = out.wedge(*this);
  return out;
}

bool KForm::vanishes(const ZeroTestOptions& options) const {
  for (const auto& [mask, c] : terms_)
    if (!is_zero(c, options)) return false;
  return true;
}

}  // namespace srusk
