#include "dtil/differential.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "dtil/parallel.hpp"

namespace dtil {

namespace {

constexpr cplx kI{0.0, 1.0};

// Covariant central difference nabla_mu of component c of `x` at site i.
inline Mat2 nabla(const MatrixField& x, int c, const ConnectionField& a, const NeighborTable& nb,
                  std::size_t i, int mu, double inv2h) {
  Mat2 d = (x.at(nb.plus(i, mu), c) - x.at(nb.minus(i, mu), c)) * inv2h;
  d += commutator(a.at(i, mu), x.at(i, c));
  return d;
}

void require_same_lattice(const LatticeSpec& a, const LatticeSpec& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different lattices");
}

// increasing multi-indices of the given size, lexicographic order
std::vector<unsigned> sorted_masks(int dimension, int degree) {
  std::vector<unsigned> masks;
  for (unsigned m = 0; m < (1u << dimension); ++m)
    if (std::popcount(m) == degree) masks.push_back(m);
  std::sort(masks.begin(), masks.end(), [](unsigned x, unsigned y) {
    for (int k = 0; k < 32; ++k) {
      const bool bx = x & (1u << k), by = y & (1u << k);
      if (bx != by) return bx;
    }
    return false;
  });
  return masks;
}

}  // namespace

FormIndex::FormIndex(int dimension, int degree)
    : dimension_(dimension), degree_(degree), masks_(sorted_masks(dimension, degree)) {
  if (degree >= dimension) return;
  const auto upper = sorted_masks(dimension, degree + 1);
  cofaces_.resize(upper.size());
  for (std::size_t u = 0; u < upper.size(); ++u) {
    int pos = 0;
    for (int axis = 0; axis < dimension; ++axis) {
      if (!(upper[u] & (1u << axis))) continue;
      cofaces_[u].push_back(Face{component(upper[u] & ~(1u << axis)), axis, pos % 2 == 0 ? 1 : -1});
      ++pos;
    }
  }
}

const FormIndex& FormIndex::real(int degree) {
  static const std::array<FormIndex, 7> table = {FormIndex(6, 0), FormIndex(6, 1), FormIndex(6, 2), FormIndex(6, 3),
                                                 FormIndex(6, 4), FormIndex(6, 5), FormIndex(6, 6)};
  if (degree < 0 || degree > 6) throw std::out_of_range("form degree");
  return table[degree];
}

const FormIndex& FormIndex::antiholo(int degree) {
  static const std::array<FormIndex, 4> table = {FormIndex(3, 0), FormIndex(3, 1), FormIndex(3, 2), FormIndex(3, 3)};
  if (degree < 0 || degree > 3) throw std::out_of_range("form degree");
  return table[degree];
}

std::vector<int> FormIndex::indices(int c) const {
  std::vector<int> out;
  for (int k = 0; k < dimension_; ++k)
    if (masks_[c] & (1u << k)) out.push_back(k);
  return out;
}

int FormIndex::component(unsigned mask) const {
  for (std::size_t c = 0; c < masks_.size(); ++c)
    if (masks_[c] == mask) return static_cast<int>(c);
  return -1;
}

CurvatureField curvature(const ConnectionField& a) {
  const LatticeSpec& spec = a.spec();
  const auto nb = NeighborTable::get(spec);
  const double inv2h = 0.5 / spec.spacing;
  const FormIndex& idx = FormIndex::real(2);
  CurvatureField f(spec, 2);
  std::array<std::pair<int, int>, 15> pairs{};
  for (int c = 0; c < idx.count(); ++c) {
    const auto ij = idx.indices(c);
    pairs[c] = {ij[0], ij[1]};
  }
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      for (int c = 0; c < 15; ++c) {
        const auto [mu, nu] = pairs[c];
        Mat2 v = (a.at(nb->plus(i, mu), nu) - a.at(nb->minus(i, mu), nu)) * inv2h;
        v -= (a.at(nb->plus(i, nu), mu) - a.at(nb->minus(i, nu), mu)) * inv2h;
        v += commutator(a.at(i, mu), a.at(i, nu));
        f.field.at(i, c) = v;
      }
    }
  });
  return f;
}

namespace {

// complex direction c: 0..2 holomorphic d/dz^a, 3..5 antiholomorphic d/dzbar^a.
// d/dz^a = (e_2a - i e_2a+1)/2, d/dzbar^a = (e_2a + i e_2a+1)/2.
struct ComplexFrame {
  std::array<std::array<cplx, kDim>, kDim> to_complex{};  // P[c][mu]
  std::array<std::array<cplx, kDim>, kDim> to_real{};     // Q[mu][c]
  ComplexFrame() {
    for (int a = 0; a < 3; ++a) {
      to_complex[a][2 * a] = 0.5;
      to_complex[a][2 * a + 1] = -0.5 * kI;
      to_complex[3 + a][2 * a] = 0.5;
      to_complex[3 + a][2 * a + 1] = 0.5 * kI;
      to_real[2 * a][a] = 1.0;
      to_real[2 * a][3 + a] = 1.0;
      to_real[2 * a + 1][a] = kI;
      to_real[2 * a + 1][3 + a] = -kI;
    }
  }
};

const ComplexFrame& frame() {
  static const ComplexFrame f;
  return f;
}

// full antisymmetric 6x6 view of a 2-form at a site
std::array<std::array<Mat2, kDim>, kDim> full_two_form(const MatrixField& f, std::size_t site) {
  std::array<std::array<Mat2, kDim>, kDim> out{};
  const FormIndex& idx = FormIndex::real(2);
  for (int c = 0; c < idx.count(); ++c) {
    const auto ij = idx.indices(c);
    out[ij[0]][ij[1]] = f.at(site, c);
    out[ij[1]][ij[0]] = -f.at(site, c);
  }
  return out;
}

}  // namespace

TypeComponents type_decompose(const CurvatureField& f) {
  if (f.degree != 2) throw std::invalid_argument("type_decompose expects a 2-form");
  const LatticeSpec& spec = f.field.spec();
  const auto& P = frame().to_complex;
  TypeComponents out{AntiholomorphicForm(spec, 2), MatrixField(spec, 3), MatrixField(spec, 9)};
  const FormIndex& idx2 = FormIndex::antiholo(2);
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto F = full_two_form(f.field, i);
      auto G = [&](int c, int d) {
        Mat2 s;
        for (int mu = 0; mu < kDim; ++mu) {
          if (P[c][mu] == 0.0) continue;
          for (int nu = 0; nu < kDim; ++nu) {
            if (P[d][nu] == 0.0 || mu == nu) continue;
            s += F[mu][nu] * (P[c][mu] * P[d][nu]);
          }
        }
        return s;
      };
      for (int c = 0; c < idx2.count(); ++c) {
        const auto ab = idx2.indices(c);
        out.f02.field.at(i, c) = G(3 + ab[0], 3 + ab[1]);
        out.f20.at(i, c) = G(ab[0], ab[1]);
      }
      for (int a = 0; a < 3; ++a)
        for (int bb = 0; bb < 3; ++bb) out.f11.at(i, 3 * a + bb) = G(a, 3 + bb);
    }
  });
  return out;
}

CurvatureField reassemble(const TypeComponents& parts) {
  const LatticeSpec& spec = parts.f11.spec();
  const auto& Q = frame().to_real;
  const FormIndex& idx2 = FormIndex::antiholo(2);
  const FormIndex& real2 = FormIndex::real(2);
  CurvatureField f(spec, 2);
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      std::array<std::array<Mat2, kDim>, kDim> G{};
      for (int c = 0; c < idx2.count(); ++c) {
        const auto ab = idx2.indices(c);
        G[3 + ab[0]][3 + ab[1]] = parts.f02.field.at(i, c);
        G[3 + ab[1]][3 + ab[0]] = -parts.f02.field.at(i, c);
        G[ab[0]][ab[1]] = parts.f20.at(i, c);
        G[ab[1]][ab[0]] = -parts.f20.at(i, c);
      }
      for (int a = 0; a < 3; ++a)
        for (int bb = 0; bb < 3; ++bb) {
          G[a][3 + bb] = parts.f11.at(i, 3 * a + bb);
          G[3 + bb][a] = -parts.f11.at(i, 3 * a + bb);
        }
      for (int c = 0; c < real2.count(); ++c) {
        const auto mn = real2.indices(c);
        Mat2 s;
        for (int x = 0; x < kDim; ++x) {
          if (Q[mn[0]][x] == 0.0) continue;
          for (int y = 0; y < kDim; ++y) {
            if (Q[mn[1]][y] == 0.0) continue;
            s += G[x][y] * (Q[mn[0]][x] * Q[mn[1]][y]);
          }
        }
        f.field.at(i, c) = s;
      }
    }
  });
  return f;
}

RealForm covariant_exterior(const ConnectionField& a, const RealForm& alpha) {
  const LatticeSpec& spec = a.spec();
  require_same_lattice(spec, alpha.field.spec());
  if (alpha.degree >= kDim) throw std::invalid_argument("cannot differentiate a top-degree form");
  const auto nb = NeighborTable::get(spec);
  const double inv2h = 0.5 / spec.spacing;
  const auto& cof = FormIndex::real(alpha.degree).cofaces();
  RealForm out(spec, alpha.degree + 1);
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t J = 0; J < cof.size(); ++J) {
        Mat2 s;
        for (const auto& face : cof[J]) {
          const Mat2 d = nabla(alpha.field, face.lower, a, *nb, i, face.axis, inv2h);
          if (face.sign > 0) s += d; else s -= d;
        }
        out.field.at(i, static_cast<int>(J)) = s;
      }
  });
  return out;
}

RealForm covariant_coexterior(const ConnectionField& a, const RealForm& beta) {
  const LatticeSpec& spec = a.spec();
  require_same_lattice(spec, beta.field.spec());
  if (beta.degree <= 0) throw std::invalid_argument("cannot co-differentiate a 0-form");
  const auto nb = NeighborTable::get(spec);
  const double inv2h = 0.5 / spec.spacing;
  const auto& cof = FormIndex::real(beta.degree - 1).cofaces();
  RealForm out(spec, beta.degree - 1);
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t J = 0; J < cof.size(); ++J)
        for (const auto& face : cof[J]) {
          // adjoint of nabla is -nabla
          const Mat2 d = nabla(beta.field, static_cast<int>(J), a, *nb, i, face.axis, inv2h);
          if (face.sign > 0) out.field.at(i, face.lower) -= d; else out.field.at(i, face.lower) += d;
        }
  });
  return out;
}

AntiholomorphicForm dbar_A(const AntiholomorphicForm& alpha, const ConnectionField& a) {
  if (alpha.degree < 0 || alpha.degree > 2) throw std::invalid_argument("dbar_A accepts (0,q) forms with q in {0,1,2}");
  const LatticeSpec& spec = a.spec();
  require_same_lattice(spec, alpha.field.spec());
  const auto nb = NeighborTable::get(spec);
  const double inv2h = 0.5 / spec.spacing;
  const auto& cof = FormIndex::antiholo(alpha.degree).cofaces();
  AntiholomorphicForm out(spec, alpha.degree + 1);
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t J = 0; J < cof.size(); ++J) {
        Mat2 s;
        for (const auto& face : cof[J]) {
          const int bb = face.axis;
          Mat2 d = nabla(alpha.field, face.lower, a, *nb, i, 2 * bb, inv2h);
          d += nabla(alpha.field, face.lower, a, *nb, i, 2 * bb + 1, inv2h) * kI;
          d *= 0.5 * face.sign;
          s += d;
        }
        out.field.at(i, static_cast<int>(J)) = s;
      }
  });
  return out;
}

AntiholomorphicForm dbar_A_adjoint(const AntiholomorphicForm& beta, const ConnectionField& a) {
  if (beta.degree < 1 || beta.degree > 3) throw std::invalid_argument("dbar_A_adjoint accepts (0,q) forms with q in {1,2,3}");
  const LatticeSpec& spec = a.spec();
  require_same_lattice(spec, beta.field.spec());
  const auto nb = NeighborTable::get(spec);
  const double inv2h = 0.5 / spec.spacing;
  const auto& cof = FormIndex::antiholo(beta.degree - 1).cofaces();
  AntiholomorphicForm out(spec, beta.degree - 1);
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t J = 0; J < cof.size(); ++J)
        for (const auto& face : cof[J]) {
          // adjoint of nabla_{bbar} is -nabla_b = -(nabla_2b - i nabla_2b+1)/2
          const int bb = face.axis;
          Mat2 d = nabla(beta.field, static_cast<int>(J), a, *nb, i, 2 * bb, inv2h);
          d -= nabla(beta.field, static_cast<int>(J), a, *nb, i, 2 * bb + 1, inv2h) * kI;
          d *= -0.5 * face.sign;
          out.field.at(i, face.lower) += d;
        }
  });
  return out;
}

AntiholomorphicForm as_form(const HiggsField& u) {
  AntiholomorphicForm f(u.spec(), 3);
  for (std::size_t i = 0; i < u.sites(); ++i) f.field.at(i, 0) = u.at(i, 0);
  return f;
}

AntiholomorphicForm dbar_A_adjoint(const HiggsField& u, const ConnectionField& a) {
  return dbar_A_adjoint(as_form(u), a);
}

namespace {

// dzbar^1 ^ dzbar^2 ^ dzbar^3 = sum over choices of (-i)^{#odd axes} dx^I
struct VExpansion {
  std::array<int, 8> component{};
  std::array<cplx, 8> gamma{};
  VExpansion() {
    const FormIndex& idx3 = FormIndex::real(3);
    for (int c = 0; c < 8; ++c) {
      unsigned mask = 0;
      cplx g = 1.0;
      for (int a = 0; a < 3; ++a) {
        const int pick = (c >> a) & 1;
        mask |= 1u << (2 * a + pick);
        if (pick) g *= -kI;
      }
      component[c] = idx3.component(mask);
      gamma[c] = g;
    }
  }
};

const VExpansion& v_expansion() {
  static const VExpansion v;
  return v;
}

}  // namespace

RealForm assemble_v(const HiggsField& phi) {
  const auto& vx = v_expansion();
  RealForm v(phi.spec(), 3);
  parallel::parallel_for(phi.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Mat2& p = phi.at(i, 0);
      const Mat2 pd = adjoint(p);
      for (int c = 0; c < 8; ++c) v.field.at(i, vx.component[c]) = p * vx.gamma[c] + pd * std::conj(vx.gamma[c]);
    }
  });
  return v;
}

HiggsField assemble_v_transpose(const RealForm& z) {
  if (z.degree != 3) throw std::invalid_argument("assemble_v_transpose expects a 3-form");
  const auto& vx = v_expansion();
  HiggsField out(z.field.spec());
  parallel::parallel_for(out.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Mat2 s;
      for (int c = 0; c < 8; ++c) {
        const Mat2& zc = z.field.at(i, vx.component[c]);
        s += (zc + adjoint(zc)) * std::conj(vx.gamma[c]);
      }
      out.at(i, 0) = project_traceless(s);
    }
  });
  return out;
}

namespace {

// the faces of D_A^* that touch the eight non-zero components of v
struct VFaceTable {
  struct Entry {
    int upper;
    int lower;
    int axis;
    int sign;
  };
  std::vector<Entry> entries;
  VFaceTable() {
    const auto& cof = FormIndex::real(2).cofaces();
    for (int c = 0; c < 8; ++c) {
      const int J = v_expansion().component[c];
      for (const auto& f : cof[J]) entries.push_back({J, f.lower, f.axis, f.sign});
    }
  }
};

const VFaceTable& v_faces() {
  static const VFaceTable t;
  return t;
}

}  // namespace

RealForm dA_star_v(const ConnectionField& a, const RealForm& v) {
  const LatticeSpec& spec = a.spec();
  require_same_lattice(spec, v.field.spec());
  if (v.degree != 3) throw std::invalid_argument("dA_star_v expects a 3-form");
  const auto nb = NeighborTable::get(spec);
  const double inv2h = 0.5 / spec.spacing;
  const auto& vf = v_faces();
  RealForm out(spec, 2);
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (const auto& en : vf.entries) {
        const Mat2 d = nabla(v.field, en.upper, a, *nb, i, en.axis, inv2h);
        if (en.sign > 0) out.field.at(i, en.lower) -= d; else out.field.at(i, en.lower) += d;
      }
  });
  return out;
}

RealForm dA_star_v(const FieldState& state) { return dA_star_v(state.connection, assemble_v(state.higgs)); }

HiggsField v_transpose_exterior(const ConnectionField& a, const RealForm& w) {
  const LatticeSpec& spec = a.spec();
  require_same_lattice(spec, w.field.spec());
  if (w.degree != 2) throw std::invalid_argument("v_transpose_exterior expects a 2-form");
  const auto nb = NeighborTable::get(spec);
  const double inv2h = 0.5 / spec.spacing;
  const auto& vx = v_expansion();
  const auto& cof = FormIndex::real(2).cofaces();
  HiggsField out(spec);
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Mat2 s;
      for (int c = 0; c < 8; ++c) {
        Mat2 z;
        for (const auto& face : cof[vx.component[c]]) {
          const Mat2 d = nabla(w.field, face.lower, a, *nb, i, face.axis, inv2h);
          if (face.sign > 0) z += d; else z -= d;
        }
        s += (z + adjoint(z)) * std::conj(vx.gamma[c]);
      }
      out.at(i, 0) = project_traceless(s);
    }
  });
  return out;
}

double lambda_constant(double c1_dot_omega2, int rank, double omega_cubed) {
  if (rank <= 0 || omega_cubed == 0.0) throw std::invalid_argument("lambda_constant: rank and volume must be positive");
  return 3.0 * c1_dot_omega2 / (rank * omega_cubed);
}

double pairing(const MatrixField& x, const MatrixField& y) { return x.dot(y); }

ResidualPair dt_residuals(const FieldState& state, double kappa) {
  return dt_residuals(state, curvature(state.connection), kappa);
}

ResidualPair dt_residuals(const FieldState& state, const CurvatureField& f, double kappa) {
  const LatticeSpec& spec = state.spec();
  require_same_lattice(spec, f.field.spec());
  if (f.degree != 2) throw std::invalid_argument("dt_residuals expects the curvature 2-form");
  const auto& P = frame().to_complex;
  const FormIndex& real2 = FormIndex::real(2);
  const FormIndex& anti2 = FormIndex::antiholo(2);
  // F^{0,2}_{ab} = sum over mu in pair a, nu in pair b of P[abar][mu] P[bbar][nu] F_{mu nu}
  struct Term {
    int component;
    cplx coeff;
  };
  std::array<std::array<Term, 4>, 3> f02_terms{};
  for (int c = 0; c < anti2.count(); ++c) {
    const auto ab = anti2.indices(c);
    int k = 0;
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) {
        const int mu = 2 * ab[0] + s, nu = 2 * ab[1] + t;
        f02_terms[c][k++] = {real2.component((1u << mu) | (1u << nu)), cmul(P[3 + ab[0]][mu], P[3 + ab[1]][nu])};
      }
  }
  std::array<int, 3> diag{};
  for (int a = 0; a < 3; ++a) diag[a] = real2.component((1u << (2 * a)) | (1u << (2 * a + 1)));
  const double lambda = lambda_su2();

  ResidualPair r;
  r.r1 = dbar_A_adjoint(state.higgs, state.connection);
  r.r2 = MatrixField(spec, 1);
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      for (int c = 0; c < 3; ++c)
        for (const auto& t : f02_terms[c]) r.r1.field.at(i, c) += f.field.at(i, t.component) * t.coeff;
      Mat2 lf;
      for (int a = 0; a < 3; ++a) lf += f.field.at(i, diag[a]);
      Mat2 s = lf * kI + commutator_bracket(state.higgs.at(i, 0)) * kappa;
      s.m[0] -= lambda;
      s.m[3] -= lambda;
      r.r2.at(i, 0) = s;
    }
  });
  r.r1_norm = std::sqrt(r.r1.field.norm2());
  r.r2_norm = std::sqrt(r.r2.norm2());
  return r;
}

}  // namespace dtil
