// Copyright 2026 The glomnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "glomnet/nn/layers.h"

#include <algorithm>
#include <cstring>

#include "glomnet/error.h"

namespace glomnet {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw DataError(message);
}

// Unrolls one CHW sample into a [C*9, H*W] patch matrix with zero padding.
// Row (c*9 + ky*3 + kx) holds input(c, y+ky-1, x+kx-1) at column y*W + x.
void im2col(const double* src, int c_in, int h, int w, double* col) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int c = 0; c < c_in; ++c) {
    const double* sp = src + c * plane;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        double* row = col + (static_cast<std::size_t>(c) * 9 + ky * 3 + kx) * plane;
        for (int y = 0; y < h; ++y) {
          double* dst = row + static_cast<std::size_t>(y) * w;
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) {
            std::fill(dst, dst + w, 0.0);
            continue;
          }
          const double* srow = sp + static_cast<std::size_t>(sy) * w;
          const int x_lo = kx == 0 ? 1 : 0;
          const int x_hi = kx == 2 ? w - 1 : w;
          if (x_lo == 1) dst[0] = 0.0;
          if (x_hi == w - 1) dst[w - 1] = 0.0;
          for (int x = x_lo; x < x_hi; ++x) dst[x] = srow[x + kx - 1];
        }
      }
    }
  }
}

// Inverse scatter of im2col: accumulates patch gradients back onto the input.
void col2im_add(const double* col, int c_in, int h, int w, double* dst) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int c = 0; c < c_in; ++c) {
    double* dp = dst + c * plane;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const double* row = col + (static_cast<std::size_t>(c) * 9 + ky * 3 + kx) * plane;
        const int y_lo = ky == 0 ? 1 : 0;
        const int y_hi = ky == 2 ? h - 1 : h;
        const int x_lo = kx == 0 ? 1 : 0;
        const int x_hi = kx == 2 ? w - 1 : w;
        for (int y = y_lo; y < y_hi; ++y) {
          const double* srow = row + static_cast<std::size_t>(y) * w;
          double* drow = dp + static_cast<std::size_t>(y + ky - 1) * w + (kx - 1);
          for (int x = x_lo; x < x_hi; ++x) drow[x] += srow[x];
        }
      }
    }
  }
}

using v2d = double __attribute__((vector_size(16)));

inline v2d load2(const double* p) {
  v2d v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline void store2(double* p, v2d v) { std::memcpy(p, &v, sizeof v); }

// C[M x P] += A[M x K] * B[K x P]. A is addressed through row and column
// strides so a transposed operand needs no copy; B and C are row-major with
// leading dimension P. The accumulation order is fixed by the loop nest.
void gemm_acc(std::size_t m_rows, std::size_t k_len, std::size_t p_len, const double* a,
              std::size_t a_rs, std::size_t a_cs, const double* b, double* c) {
  constexpr std::size_t kRows = 4, kCols = 8;
  const std::size_t p_vec = p_len - p_len % kCols;
  std::size_t m = 0;
  for (; m + kRows <= m_rows; m += kRows) {
    for (std::size_t p = 0; p < p_vec; p += kCols) {
      v2d acc[kRows][kCols / 2];
      for (std::size_t r = 0; r < kRows; ++r) {
        for (std::size_t j = 0; j < kCols / 2; ++j) acc[r][j] = load2(c + (m + r) * p_len + p + 2 * j);
      }
      for (std::size_t k = 0; k < k_len; ++k) {
        const double* brow = b + k * p_len + p;
        v2d bv[kCols / 2];
        for (std::size_t j = 0; j < kCols / 2; ++j) bv[j] = load2(brow + 2 * j);
        for (std::size_t r = 0; r < kRows; ++r) {
          const double av = a[(m + r) * a_rs + k * a_cs];
          const v2d aa = {av, av};
          for (std::size_t j = 0; j < kCols / 2; ++j) acc[r][j] += aa * bv[j];
        }
      }
      for (std::size_t r = 0; r < kRows; ++r) {
        for (std::size_t j = 0; j < kCols / 2; ++j) store2(c + (m + r) * p_len + p + 2 * j, acc[r][j]);
      }
    }
  }
  // Leftover rows and columns take the scalar path.
  for (std::size_t mm = 0; mm < m_rows; ++mm) {
    const std::size_t p_start = mm < m ? p_vec : 0;
    if (p_start >= p_len) continue;
    double* crow = c + mm * p_len;
    for (std::size_t k = 0; k < k_len; ++k) {
      const double av = a[mm * a_rs + k * a_cs];
      const double* brow = b + k * p_len;
      for (std::size_t p = p_start; p < p_len; ++p) crow[p] += av * brow[p];
    }
  }
}

void transpose(const double* src, std::size_t rows, std::size_t cols, double* dst) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t q = 0; q < cols; ++q) dst[q * rows + r] = src[r * cols + q];
  }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernels, const Tensor& bias) {
  require(input.rank() == 4 && kernels.rank() == 4, "conv2d: expected NCHW input and OCHW kernels");
  require(kernels.dim(2) == 3 && kernels.dim(3) == 3, "conv2d: kernels must be 3x3");
  require(kernels.dim(1) == input.dim(1), "conv2d: channel mismatch");
  require(bias.size() == kernels.dim(0), "conv2d: bias length mismatch");
  const int n = static_cast<int>(input.dim(0));
  const int c_in = static_cast<int>(input.dim(1));
  const int h = static_cast<int>(input.dim(2));
  const int w = static_cast<int>(input.dim(3));
  const int c_out = static_cast<int>(kernels.dim(0));
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const std::size_t taps = static_cast<std::size_t>(c_in) * 9;

  Tensor out({input.dim(0), kernels.dim(0), input.dim(2), input.dim(3)});
  std::vector<double> col(taps * plane);
  for (int s = 0; s < n; ++s) {
    im2col(input.data() + static_cast<std::size_t>(s) * c_in * plane, c_in, h, w, col.data());
    double* dst = out.data() + static_cast<std::size_t>(s) * c_out * plane;
    for (int o = 0; o < c_out; ++o) std::fill(dst + o * plane, dst + (o + 1) * plane, bias[o]);
    gemm_acc(c_out, taps, plane, kernels.data(), taps, 1, col.data(), dst);
  }
  return out;
}

void conv2d_backward(const Tensor& input, const Tensor& kernels, const Tensor& grad_output,
                     Tensor* grad_input, Tensor& grad_kernels, Tensor& grad_bias) {
  const int n = static_cast<int>(input.dim(0));
  const int c_in = static_cast<int>(input.dim(1));
  const int h = static_cast<int>(input.dim(2));
  const int w = static_cast<int>(input.dim(3));
  const int c_out = static_cast<int>(kernels.dim(0));
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const std::size_t taps = static_cast<std::size_t>(c_in) * 9;
  require(grad_output.size() == static_cast<std::size_t>(n) * c_out * plane,
          "conv2d_backward: gradient shape mismatch");
  require(grad_kernels.size() == kernels.size() && grad_bias.size() == static_cast<std::size_t>(c_out),
          "conv2d_backward: parameter gradients must be presized like the parameters");
  if (grad_input != nullptr) *grad_input = Tensor(input.shape());

  std::vector<double> col(taps * plane);
  std::vector<double> col_t(taps * plane);
  std::vector<double> gcol(grad_input != nullptr ? taps * plane : 0);
  for (int s = 0; s < n; ++s) {
    const std::size_t in_off = static_cast<std::size_t>(s) * c_in * plane;
    const double* g = grad_output.data() + static_cast<std::size_t>(s) * c_out * plane;
    for (int o = 0; o < c_out; ++o) {
      double bias_sum = 0.0;
      for (std::size_t i = 0; i < plane; ++i) bias_sum += g[o * plane + i];
      grad_bias[o] += bias_sum;
    }
    im2col(input.data() + in_off, c_in, h, w, col.data());
    transpose(col.data(), taps, plane, col_t.data());
    // dW[o, t] += sum_p g[o, p] * col[t, p]
    gemm_acc(c_out, plane, taps, g, plane, 1, col_t.data(), grad_kernels.data());
    if (grad_input != nullptr) {
      // dcol[t, p] = sum_o W[o, t] * g[o, p]
      std::fill(gcol.begin(), gcol.end(), 0.0);
      gemm_acc(taps, c_out, plane, kernels.data(), 1, taps, g, gcol.data());
      col2im_add(gcol.data(), c_in, h, w, grad_input->data() + in_off);
    }
  }
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (auto& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

void relu_backward(const Tensor& activated, Tensor& grad) {
  require(activated.size() == grad.size(), "relu_backward: shape mismatch");
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!(activated[i] > 0.0)) grad[i] = 0.0;
  }
}

PoolResult maxpool2(const Tensor& x) {
  require(x.rank() == 4, "maxpool2: expected NCHW tensor");
  const std::size_t h = x.dim(2), w = x.dim(3);
  if (h % 2 != 0 || w % 2 != 0) throw DataError("maxpool2: spatial dims must be even");
  const std::size_t planes = x.dim(0) * x.dim(1);
  const std::size_t oh = h / 2, ow = w / 2;
  PoolResult result{Tensor({x.dim(0), x.dim(1), oh, ow}), {}};
  result.argmax.resize(result.output.size());
  for (std::size_t p = 0; p < planes; ++p) {
    const std::size_t in_base = p * h * w;
    const std::size_t out_base = p * oh * ow;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        std::size_t best = in_base + 2 * oy * w + 2 * ox;
        const std::size_t candidates[3] = {best + 1, best + w, best + w + 1};
        for (auto idx : candidates) {
          if (x[idx] > x[best]) best = idx;
        }
        result.output[out_base + oy * ow + ox] = x[best];
        result.argmax[out_base + oy * ow + ox] = static_cast<std::uint32_t>(best);
      }
    }
  }
  return result;
}

Tensor maxpool2_backward(const Tensor& grad_output, std::span<const std::uint32_t> argmax,
                         const std::vector<std::size_t>& input_shape) {
  require(grad_output.size() == argmax.size(), "maxpool2_backward: shape mismatch");
  Tensor grad(input_shape);
  for (std::size_t i = 0; i < argmax.size(); ++i) grad[argmax[i]] += grad_output[i];
  return grad;
}

Tensor dense(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require(x.rank() == 2 && weight.rank() == 2, "dense: expected [N, in] input and [out, in] weight");
  require(x.dim(1) == weight.dim(1), "dense: input width mismatch");
  require(bias.size() == weight.dim(0), "dense: bias length mismatch");
  const std::size_t n = x.dim(0), in = x.dim(1), out_w = weight.dim(0);
  Tensor out({n, out_w});
  for (std::size_t s = 0; s < n; ++s) {
    const double* xs = x.data() + s * in;
    for (std::size_t o = 0; o < out_w; ++o) {
      const double* wr = weight.data() + o * in;
      double acc = bias[o];
      for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xs[i];
      out[s * out_w + o] = acc;
    }
  }
  return out;
}

void dense_backward(const Tensor& x, const Tensor& weight, const Tensor& grad_output,
                    Tensor* grad_x, Tensor& grad_weight, Tensor& grad_bias) {
  const std::size_t n = x.dim(0), in = x.dim(1), out_w = weight.dim(0);
  require(grad_output.size() == n * out_w, "dense_backward: gradient shape mismatch");
  require(grad_weight.size() == weight.size() && grad_bias.size() == out_w,
          "dense_backward: parameter gradients must be presized like the parameters");
  if (grad_x != nullptr) *grad_x = Tensor(x.shape());
  for (std::size_t s = 0; s < n; ++s) {
    const double* xs = x.data() + s * in;
    for (std::size_t o = 0; o < out_w; ++o) {
      const double g = grad_output[s * out_w + o];
      grad_bias[o] += g;
      double* gw = grad_weight.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) gw[i] += g * xs[i];
      if (grad_x != nullptr) {
        const double* wr = weight.data() + o * in;
        double* gx = grad_x->data() + s * in;
        for (std::size_t i = 0; i < in; ++i) gx[i] += g * wr[i];
      }
    }
  }
}

LossResult mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.empty()) throw DataError("mse_loss: empty batch");
  if (pred.size() != target.size()) throw DataError("mse_loss: length mismatch");
  const double n = static_cast<double>(pred.size());
  LossResult r;
  r.grad.resize(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    r.loss += d * d;
    r.grad[i] = 2.0 * d / n;
  }
  r.loss /= n;
  return r;
}

}  // namespace glomnet
