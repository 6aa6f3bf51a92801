#pragma once

#include <array>
#include <vector>

#include "dtil/fields.hpp"

namespace dtil {

/// Component bookkeeping for p-forms over `dimension` basis covectors.
/// Components are increasing multi-indices, stored as bitmasks in
/// lexicographic order.
class FormIndex {
 public:
  /// A codimension-one face of an upper component: removing `axis`
  /// (at position k of the multi-index) leaves `lower`; sign = (-1)^k.
  struct Face {
    int lower;
    int axis;
    int sign;
  };

  static const FormIndex& real(int degree);      // dx^I on the 6-torus
  static const FormIndex& antiholo(int degree);  // dzbar^I, I in {1,2,3}

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  int count() const { return static_cast<int>(masks_.size()); }
  unsigned mask(int c) const { return masks_[c]; }
  std::vector<int> indices(int c) const;
  int component(unsigned mask) const;  // -1 if absent
  /// Faces of every component of degree + 1 (indexed by upper component).
  const std::vector<std::vector<Face>>& cofaces() const { return cofaces_; }

 private:
  FormIndex(int dimension, int degree);

  int dimension_;
  int degree_;
  std::vector<unsigned> masks_;
  std::vector<std::vector<Face>> cofaces_;
};

/// Matrix-valued real p-form, coefficients on dx^I.
struct RealForm {
  int degree = 0;
  MatrixField field;

  RealForm() = default;
  RealForm(const LatticeSpec& spec, int p) : degree(p), field(spec, FormIndex::real(p).count()) {}
};

/// Matrix-valued (0,q)-form, coefficients on dzbar^I.
struct AntiholomorphicForm {
  int degree = 0;
  MatrixField field;

  AntiholomorphicForm() = default;
  AntiholomorphicForm(const LatticeSpec& spec, int q) : degree(q), field(spec, FormIndex::antiholo(q).count()) {}
};

/// F_{mu nu} for mu < nu, 15 components per site.
using CurvatureField = RealForm;

/// F = d A + A ^ A with central differences: F_{mu nu} = d_mu A_nu - d_nu A_mu + [A_mu, A_nu].
CurvatureField curvature(const ConnectionField& a);

/// Complex type components of a real 2-form:
///   f02[a<b] = F(d/dzbar^a, d/dzbar^b), f20[a<b] = F(d/dz^a, d/dz^b),
///   f11[3a+b] = F(d/dz^a, d/dzbar^b).
struct TypeComponents {
  AntiholomorphicForm f02;
  MatrixField f20;
  MatrixField f11;
};
TypeComponents type_decompose(const CurvatureField& f);
CurvatureField reassemble(const TypeComponents& parts);

/// D_A on real p-forms: (D alpha)_J = sum_k (-1)^k nabla_{j_k} alpha_{J \ j_k},
/// nabla_mu X = (X(x+e_mu) - X(x-e_mu)) / 2h + [A_mu(x), X(x)].
RealForm covariant_exterior(const ConnectionField& a, const RealForm& alpha);
/// Exact lattice adjoint of covariant_exterior.
RealForm covariant_coexterior(const ConnectionField& a, const RealForm& beta);

/// dbar_A on (0,q)-forms, q in {0,1,2}; nabla_{bbar} = (nabla_{2b} + i nabla_{2b+1}) / 2.
/// Throws std::invalid_argument for q = 3.
AntiholomorphicForm dbar_A(const AntiholomorphicForm& alpha, const ConnectionField& a);
/// Exact lattice adjoint of dbar_A, mapping (0,q+1) to (0,q).
AntiholomorphicForm dbar_A_adjoint(const AntiholomorphicForm& beta, const ConnectionField& a);
/// dbar_A^* u for u = phi dzbar^123, a (0,2)-form.
AntiholomorphicForm dbar_A_adjoint(const HiggsField& u, const ConnectionField& a);

/// The (0,3)-form u = phi dzbar^123 as a (0,3) component field.
AntiholomorphicForm as_form(const HiggsField& u);

/// Real 3-form v = u + ubar with ubar = phi^+ dz^123, expanded on dx^I.
RealForm assemble_v(const HiggsField& phi);
/// Adjoint of assemble_v (real-linear), projected trace-free.
HiggsField assemble_v_transpose(const RealForm& z);

/// D_A^* v, a real 2-form. The two-argument form expects v from
/// assemble_v and only visits its eight non-zero components.
RealForm dA_star_v(const FieldState& state);
RealForm dA_star_v(const ConnectionField& a, const RealForm& v);
/// V^T (D_A w) for a 2-form w, evaluating only the components of D_A w
/// that V^T reads.
HiggsField v_transpose_exterior(const ConnectionField& a, const RealForm& w);

/// lambda(E) = 3 (c1(E) . [omega]^2) / (r [omega]^3).
double lambda_constant(double c1_dot_omega2, int rank, double omega_cubed);
/// For SU(2) bundles c1 = 0, hence 0.
inline double lambda_su2() { return 0.0; }

/// r1 = F^{0,2} + dbar_A^* u;  r2 = i Lambda F^{1,1} + kappa [phi, phi^+] - lambda I
/// with Lambda F = sum_a F_{2a, 2a+1}; r2 is hermitian and trace-free.
struct ResidualPair {
  AntiholomorphicForm r1;
  MatrixField r2;
  double r1_norm = 0.0;
  double r2_norm = 0.0;
};
ResidualPair dt_residuals(const FieldState& state, double kappa = 1.0);
/// Same, reusing an already computed curvature of state.connection.
ResidualPair dt_residuals(const FieldState& state, const CurvatureField& f, double kappa = 1.0);

/// h^6 sum over sites and components of Re Tr(x y^+).
double pairing(const MatrixField& x, const MatrixField& y);

}  // namespace dtil
