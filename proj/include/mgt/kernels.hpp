#pragma once

#include <vector>

// Hot loops used by the forward solver and the normal-equation solver. Each kernel has a serial
// reference and an OpenMP version; both produce the same result up to reduction order.
namespace mgt::kernels {

enum class Exec { serial, parallel };

/// Process-wide default used by the solvers.
Exec default_exec();
void set_default_exec(Exec exec);

/// Compressed sparse row matrix.
struct CsrMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> val;

    std::vector<double> diagonal() const;
};

void spmv_serial(const CsrMatrix& a, const double* x, double* y);
void spmv_parallel(const CsrMatrix& a, const double* x, double* y);
void spmv(const CsrMatrix& a, const double* x, double* y, Exec exec);

double dot_serial(const double* a, const double* b, int n);
double dot_parallel(const double* a, const double* b, int n);
double dot(const double* a, const double* b, int n, Exec exec);

/// y += alpha * x
void axpy(double alpha, const double* x, double* y, int n, Exec exec);

/// out[i] = (in[i-1] - 2 in[i] + in[i+1]) / h^2 on interior nodes, 0 at the two ends.
void laplacian_serial(const double* in, double* out, int n, double h);
void laplacian_parallel(const double* in, double* out, int n, double h);

/// Per-row scaled residual r[i] = w[i] * ((A x)[i] - b[i]), squared sum returned.
double weighted_residual_serial(const CsrMatrix& a, const double* x, const double* b, const double* w, int rows);
double weighted_residual_parallel(const CsrMatrix& a, const double* x, const double* b, const double* w, int rows);

}  // namespace mgt::kernels
