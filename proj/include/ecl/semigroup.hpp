#pragma once

#include "ecl/calculus.hpp"
#include "ecl/grid.hpp"

#include <Eigen/Dense>

#include <memory>
#include <mutex>
#include <utility>
#include <vector>

namespace ecl {

enum class SemigroupRepresentation { gaussian_kernel, spectral };

// Heat/Witten semigroup P_t = e^{tL} with L = Laplacian - grad V . grad,
// i.e. heat kernel variance 2t per axis. Immutable after build; apply is
// pure and safe to call concurrently.
class SemigroupOperator {
public:
    static constexpr std::size_t kSpectralNodeBudget = 4096;

    static SemigroupOperator build(const GeometryConfig& geo);

    SemigroupRepresentation representation() const { return repr_; }
    const GeometryConfig& geometry() const { return geo_; }
    // Eigenvalues of the symmetrized generator (spectral mode only),
    // sorted ascending.
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

    ScalarField apply(const ScalarField& phi, double t) const;
    // |integral of P_t u dm - 1|, a truncation diagnostic.
    double mass_defect(const DensityField& u, double t) const;

private:
    GeometryConfig geo_;
    SemigroupRepresentation repr_ = SemigroupRepresentation::gaussian_kernel;
    // Spectral factors of H = e^{V/2} L e^{-V/2} built so that e^{-V/2}
    // is an exact null vector (exact conservation of m and of constants).
    Eigen::MatrixXd eigenvectors_;
    Eigen::VectorXd eigenvalues_;
    std::vector<double> gauge_;      // e^{-V/2} at nodes
    std::vector<double> inv_gauge_;  // e^{+V/2} at nodes

    // Scaled per-axis kernel matrices keyed by t. Building one involves a
    // symmetric Sinkhorn scaling, so repeated applications at the same t
    // (the fixed-point solver) reuse it. Small capacity: curve sampling
    // visits each t only a handful of times.
    using AxisKernels = std::vector<std::vector<double>>;
    struct KernelCache {
        std::mutex mutex;
        std::vector<std::pair<double, std::shared_ptr<const AxisKernels>>> entries;
    };
    std::shared_ptr<KernelCache> cache_;

    std::shared_ptr<const AxisKernels> axis_kernels(double t) const;
    ScalarField apply_kernel(const ScalarField& phi, double t) const;
    ScalarField apply_spectral(const ScalarField& phi, double t) const;
};

}  // namespace ecl
