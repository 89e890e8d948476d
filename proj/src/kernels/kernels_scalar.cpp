#include "ptun/kernels.hpp"

namespace ptun::kernels {

void contract_scalar(const ContractArgs& args) {
  for (std::size_t r = 0; r < args.rows; ++r) {
    double* out_re = args.out_re + r * args.cols;
    double* out_im = args.out_im + r * args.cols;
    for (std::size_t m = 0; m < args.depth; ++m) {
      const double ar = args.a_re[r * args.depth + m];
      const double ai = args.a_im[r * args.depth + m];
      const double* vr = args.v_re + m * args.cols;
      const double* vi = args.v_im + m * args.cols;
      for (std::size_t k = 0; k < args.cols; ++k) {
        out_re[k] += ar * vr[k] - ai * vi[k];
        out_im[k] += ar * vi[k] + ai * vr[k];
      }
    }
  }
}

}  // namespace ptun::kernels
