#pragma once

#include <functional>
#include <string>
#include <vector>

namespace rra {

/// Finite-difference solution of -Laplace(u) = f on the unit square with
/// zero Dirichlet data, on a boundary-inclusive uniform grid. Node (i,j)
/// sits at (i*h, j*h), h = 1/(n-1), values stored row-major by j.
struct FdGrid {
  int n = 0;
  std::vector<double> u;
  double residual_inf = 0.0;  // max |A u - f| over interior nodes
  double h() const { return 1.0 / (n - 1); }
  double at(int i, int j) const { return u[static_cast<std::size_t>(j) * n + i]; }

  /// Bilinear interpolation; throws std::domain_error outside [0,1]^2.
  double interpolate(double x, double y) const;
};

/// Direct 5-point solve by diagonalizing in the discrete sine basis
/// (dense transforms, no FFT), followed by one iterative-refinement
/// pass. Grid sizes of a few hundred solve in seconds.
FdGrid fd_poisson_solve(int grid_n, const std::function<double(double, double)>& f);

/// The discontinuous-forcing benchmark oracle: f jumps at x = 0.5 from
/// 2 pi^2 sin(pi x) sin(pi y) to -6 pi^2 sin(pi x) sin(pi y). grid_n must
/// be odd and >= 201 so the interface column lies exactly on a node,
/// where the source takes the mean of its one-sided limits (the
/// flux-balance value).
FdGrid fd_poisson_jump_solve(int grid_n);

/// Same, backed by a versioned on-disk cache (header records problem,
/// grid size and solver tolerance).
FdGrid fd_poisson_jump_cached(int grid_n, const std::string& cache_dir);

}  // namespace rra
