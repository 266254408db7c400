// vmbeam/bf/beamformer.cpp
//
// Copyright 2026 vmbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vmbeam/bf/beamformer.hpp"

#include <algorithm>
#include <cmath>

#include "vmbeam/kernels/kernels.hpp"
#include "vmbeam/nn/ops.hpp"

namespace vmbeam::bf {

namespace {

struct Complex {
  double re, im;
};

inline Complex cmul(Complex a, Complex b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline Complex cdiv(Complex a, Complex b) {
  const double d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline double cabs2(Complex a) { return a.re * a.re + a.im * a.im; }

Complex get(const CMat& m, int i, int j) {
  return {m.re[m.idx(i, j)], m.im[m.idx(i, j)]};
}
void set(CMat& m, int i, int j, Complex v) {
  m.re[m.idx(i, j)] = v.re;
  m.im[m.idx(i, j)] = v.im;
}

// Hermitian Cholesky A = L L^H; returns false if not positive definite.
bool cholesky(const CMat& a, CMat& l) {
  const int n = a.n;
  l = CMat::zeros(n);
  for (int j = 0; j < n; ++j) {
    double d = a.re[a.idx(j, j)];
    for (int k = 0; k < j; ++k) d -= cabs2(get(l, j, k));
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double ljj = std::sqrt(d);
    set(l, j, j, {ljj, 0.0});
    for (int i = j + 1; i < n; ++i) {
      Complex s = get(a, i, j);
      for (int k = 0; k < j; ++k) {
        const Complex lik = get(l, i, k);
        const Complex ljk = get(l, j, k);
        // s -= lik * conj(ljk)
        s.re -= lik.re * ljk.re + lik.im * ljk.im;
        s.im -= lik.im * ljk.re - lik.re * ljk.im;
      }
      set(l, i, j, {s.re / ljj, s.im / ljj});
    }
  }
  return true;
}

// Solve L L^H x = b in place (b is one column of length n).
void cholesky_solve(const CMat& l, std::vector<Complex>& b) {
  const int n = l.n;
  for (int i = 0; i < n; ++i) {
    Complex s = b[i];
    for (int k = 0; k < i; ++k) {
      const Complex lik = get(l, i, k);
      s.re -= lik.re * b[k].re - lik.im * b[k].im;
      s.im -= lik.re * b[k].im + lik.im * b[k].re;
    }
    const double d = l.re[l.idx(i, i)];
    b[i] = {s.re / d, s.im / d};
  }
  for (int i = n - 1; i >= 0; --i) {
    Complex s = b[i];
    for (int k = i + 1; k < n; ++k) {
      // s -= conj(L[k][i]) * b[k]
      const Complex lki = get(l, k, i);
      s.re -= lki.re * b[k].re + lki.im * b[k].im;
      s.im -= lki.re * b[k].im - lki.im * b[k].re;
    }
    const double d = l.re[l.idx(i, i)];
    b[i] = {s.re / d, s.im / d};
  }
}

// Partial-pivot LU; returns false when singular.
bool lu_factor(CMat& a, std::vector<int>& piv) {
  const int n = a.n;
  piv.resize(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int col = 0; col < n; ++col) {
    int best = col;
    double best_mag = cabs2(get(a, col, col));
    for (int r = col + 1; r < n; ++r) {
      const double mag = cabs2(get(a, r, col));
      if (mag > best_mag) {
        best_mag = mag;
        best = r;
      }
    }
    if (best_mag <= 0.0 || !std::isfinite(best_mag)) return false;
    if (best != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a.re[a.idx(col, j)], a.re[a.idx(best, j)]);
        std::swap(a.im[a.idx(col, j)], a.im[a.idx(best, j)]);
      }
      std::swap(piv[col], piv[best]);
    }
    const Complex pivot = get(a, col, col);
    for (int r = col + 1; r < n; ++r) {
      const Complex f = cdiv(get(a, r, col), pivot);
      set(a, r, col, f);
      for (int j = col + 1; j < n; ++j) {
        const Complex sub = cmul(f, get(a, col, j));
        a.re[a.idx(r, j)] -= sub.re;
        a.im[a.idx(r, j)] -= sub.im;
      }
    }
  }
  return true;
}

void lu_solve(const CMat& lu, const std::vector<int>& piv,
              std::vector<Complex>& b) {
  const int n = lu.n;
  std::vector<Complex> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[piv[i]];
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < i; ++k) {
      const Complex sub = cmul(get(lu, i, k), x[k]);
      x[i].re -= sub.re;
      x[i].im -= sub.im;
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int k = i + 1; k < n; ++k) {
      const Complex sub = cmul(get(lu, i, k), x[k]);
      x[i].re -= sub.re;
      x[i].im -= sub.im;
    }
    x[i] = cdiv(x[i], get(lu, i, i));
  }
  b = std::move(x);
}

CMat loaded(const CMat& a, double rel_load) {
  CMat out = a;
  double tr = 0.0;
  for (int i = 0; i < a.n; ++i) tr += a.re[a.idx(i, i)];
  const double delta = rel_load * std::max(tr, 0.0) / a.n;
  for (int i = 0; i < a.n; ++i) out.re[out.idx(i, i)] += delta;
  return out;
}

void check_block_tiling(const BeamWeights& w, int frames) {
  int expected = 0;
  for (const auto& b : w.blocks) {
    require(b.t_begin == expected && b.t_end > b.t_begin, ErrorKind::data,
            "beam weights do not tile the frame axis");
    expected = b.t_end;
  }
  require(expected == frames, ErrorKind::data,
          "beam weights cover a different frame count than the input");
}

using WeightFn = void (*)(const BlockScmSet&, int, int, int, Complex*);

void mcwf_bin(const BlockScmSet& scms, int block, int f, int ref, Complex* w) {
  const int m = scms.channels;
  const CMat t = scms.target_at(block, f);
  const CMat n = scms.noise_at(block, f);
  CMat sum = CMat::zeros(m);
  kernels::add(t.re.data(), n.re.data(), sum.re.data(), sum.re.size());
  kernels::add(t.im.data(), n.im.data(), sum.im.data(), sum.im.size());
  CMat sol;
  try {
    sol = solve_hermitian_loaded(sum, t, kDiagLoadRel);
  } catch (const Error& e) {
    throw Error(ErrorKind::numeric,
                "mcwf inversion failed at bin " + std::to_string(f) + ": " +
                    e.what());
  }
  for (int i = 0; i < m; ++i) w[i] = get(sol, i, ref);
}

void souden_bin(const BlockScmSet& scms, int block, int f, int ref, Complex* w) {
  const int m = scms.channels;
  const CMat t = scms.target_at(block, f);
  const CMat n = scms.noise_at(block, f);
  CMat c;
  try {
    c = solve_hermitian_loaded(n, t, kDiagLoadRel);
  } catch (const Error& e) {
    throw Error(ErrorKind::numeric,
                "souden inversion failed at bin " + std::to_string(f) + ": " +
                    e.what());
  }
  Complex tr{0.0, 0.0};
  for (int i = 0; i < m; ++i) {
    tr.re += c.re[c.idx(i, i)];
    tr.im += c.im[c.idx(i, i)];
  }
  require(cabs2(tr) > 1e-280, ErrorKind::numeric,
          "souden: zero trace at bin " + std::to_string(f));
  for (int i = 0; i < m; ++i) w[i] = cdiv(get(c, i, ref), tr);
}

BeamWeights compute_weights(const BlockScmSet& scms, int ref, Backend backend,
                            WeightFn fn) {
  require(ref >= 0 && ref < scms.channels, ErrorKind::config,
          "reference channel out of range");
  BeamWeights w;
  w.backend = backend;
  w.ref_channel = ref;
  w.channels = scms.channels;
  w.bins = scms.bins;
  const int m = scms.channels;
  std::vector<Complex> wv(m);
  for (std::size_t b = 0; b < scms.blocks.size(); ++b) {
    BeamWeights::Block block;
    block.t_begin = scms.blocks[b].t_begin;
    block.t_end = scms.blocks[b].t_end;
    block.w_re.assign(static_cast<std::size_t>(scms.bins) * m, 0.0);
    block.w_im.assign(block.w_re.size(), 0.0);
    for (int f = 0; f < scms.bins; ++f) {
      fn(scms, static_cast<int>(b), f, ref, wv.data());
      for (int i = 0; i < m; ++i) {
        block.w_re[static_cast<std::size_t>(f) * m + i] = wv[i].re;
        block.w_im[static_cast<std::size_t>(f) * m + i] = wv[i].im;
      }
    }
    w.blocks.push_back(std::move(block));
  }
  return w;
}

}  // namespace

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::mcwf: return "mcwf";
    case Backend::mvdr_souden: return "mvdr_souden";
    case Backend::none: return "none";
  }
  return "?";
}

Backend backend_from_name(const std::string& name) {
  if (name == "mcwf") return Backend::mcwf;
  if (name == "mvdr_souden") return Backend::mvdr_souden;
  if (name == "none") return Backend::none;
  throw Error(ErrorKind::config, "unknown beamformer backend: " + name);
}

CMat solve_hermitian_loaded(const CMat& a, const CMat& b, double rel_load) {
  require(a.n == b.n && a.n >= 1, ErrorKind::numeric, "solve: size mismatch");
  const int n = a.n;
  const CMat al = loaded(a, rel_load);

  CMat chol;
  const bool spd = cholesky(al, chol);
  CMat lu = al;
  std::vector<int> piv;
  if (!spd) {
    require(lu_factor(lu, piv), ErrorKind::numeric,
            "matrix singular after diagonal loading");
  }

  CMat out = CMat::zeros(n);
  std::vector<Complex> col(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) col[i] = get(b, i, j);
    if (spd) {
      cholesky_solve(chol, col);
    } else {
      lu_solve(lu, piv, col);
    }
    for (int i = 0; i < n; ++i) set(out, i, j, col[i]);
  }
  return out;
}

CMat matmul(const CMat& a, const CMat& b) {
  require(a.n == b.n, ErrorKind::numeric, "matmul: size mismatch");
  CMat out = CMat::zeros(a.n);
  for (int i = 0; i < a.n; ++i) {
    for (int j = 0; j < a.n; ++j) {
      Complex acc{0.0, 0.0};
      for (int k = 0; k < a.n; ++k) {
        const Complex p = cmul(get(a, i, k), get(b, k, j));
        acc.re += p.re;
        acc.im += p.im;
      }
      set(out, i, j, acc);
    }
  }
  return out;
}

std::vector<double> hermitian_eigenvalues(const CMat& a) {
  // Real symmetric embedding [[Re, -Im], [Im, Re]]; eigenvalues double up.
  const int n = a.n;
  const int m = 2 * n;
  std::vector<double> s(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Complex v = get(a, i, j);
      s[static_cast<std::size_t>(i) * m + j] = v.re;
      s[static_cast<std::size_t>(i) * m + (j + n)] = -v.im;
      s[static_cast<std::size_t>(i + n) * m + j] = v.im;
      s[static_cast<std::size_t>(i + n) * m + (j + n)] = v.re;
    }
  }
  // Cyclic Jacobi sweeps.
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < m; ++p)
      for (int q = p + 1; q < m; ++q) off += s[p * m + q] * s[p * m + q];
    if (off < 1e-24) break;
    for (int p = 0; p < m; ++p) {
      for (int q = p + 1; q < m; ++q) {
        const double apq = s[p * m + q];
        if (std::abs(apq) < 1e-300) continue;
        const double app = s[p * m + p];
        const double aqq = s[q * m + q];
        const double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
        const double c = std::cos(theta), sn = std::sin(theta);
        for (int k = 0; k < m; ++k) {
          const double skp = s[k * m + p];
          const double skq = s[k * m + q];
          s[k * m + p] = c * skp - sn * skq;
          s[k * m + q] = sn * skp + c * skq;
        }
        for (int k = 0; k < m; ++k) {
          const double spk = s[p * m + k];
          const double sqk = s[q * m + k];
          s[p * m + k] = c * spk - sn * sqk;
          s[q * m + k] = sn * spk + c * sqk;
        }
      }
    }
  }
  std::vector<double> eig(m);
  for (int i = 0; i < m; ++i) eig[i] = s[static_cast<std::size_t>(i) * m + i];
  std::sort(eig.begin(), eig.end());
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = eig[2 * i];
  return out;
}

CMat BlockScmSet::target_at(int block, int f) const {
  CMat m = CMat::zeros(channels);
  const auto& b = blocks.at(block);
  for (int i = 0; i < channels; ++i) {
    for (int j = 0; j < channels; ++j) {
      const std::size_t src = (static_cast<std::size_t>(i) * channels + j) * bins + f;
      m.re[m.idx(i, j)] = b.target_re[src];
      m.im[m.idx(i, j)] = b.target_im[src];
    }
  }
  return m;
}

CMat BlockScmSet::noise_at(int block, int f) const {
  CMat m = CMat::zeros(channels);
  const auto& b = blocks.at(block);
  for (int i = 0; i < channels; ++i) {
    for (int j = 0; j < channels; ++j) {
      const std::size_t src = (static_cast<std::size_t>(i) * channels + j) * bins + f;
      m.re[m.idx(i, j)] = b.noise_re[src];
      m.im[m.idx(i, j)] = b.noise_im[src];
    }
  }
  return m;
}

namespace {

// Accumulates v v^H over the block into [M*M*F] planes, upper triangle via
// the f-contiguous complex MAC kernel, lower triangle mirrored exactly.
void accumulate_scms(const dsp::Spectrogram& spec, int t0, int t1,
                     std::vector<double>& out_re, std::vector<double>& out_im) {
  const int m = spec.channels;
  const int f = spec.bins;
  out_re.assign(static_cast<std::size_t>(m) * m * f, 0.0);
  out_im.assign(out_re.size(), 0.0);
  for (int t = t0; t < t1; ++t) {
    for (int i = 0; i < m; ++i) {
      const double* a_re = spec.re.data() + spec.idx(i, t, 0);
      const double* a_im = spec.im.data() + spec.idx(i, t, 0);
      for (int j = i; j < m; ++j) {
        const double* b_re = spec.re.data() + spec.idx(j, t, 0);
        const double* b_im = spec.im.data() + spec.idx(j, t, 0);
        const std::size_t off = (static_cast<std::size_t>(i) * m + j) * f;
        kernels::cmul_conj_acc(out_re.data() + off, out_im.data() + off, a_re,
                               a_im, b_re, b_im, f);
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(t1 - t0);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const std::size_t up = (static_cast<std::size_t>(i) * m + j) * f;
      const std::size_t lo = (static_cast<std::size_t>(j) * m + i) * f;
      for (int k = 0; k < f; ++k) {
        out_re[up + k] *= scale;
        out_im[up + k] *= scale;
        if (i == j) {
          out_im[up + k] = 0.0;  // diagonal is real by construction
        } else {
          out_re[lo + k] = out_re[up + k];
          out_im[lo + k] = -out_im[up + k];
        }
      }
    }
  }
}

}  // namespace

BlockScmSet estimate_block_scms(const dsp::Spectrogram& target_spec,
                                const dsp::Spectrogram& noise_spec,
                                int block_len) {
  require(block_len >= 1, ErrorKind::config, "block_len must be >= 1");
  require(target_spec.channels == noise_spec.channels &&
              target_spec.frames == noise_spec.frames &&
              target_spec.bins == noise_spec.bins,
          ErrorKind::data, "estimate_block_scms: spec shape mismatch");
  require(target_spec.frames >= 1, ErrorKind::data,
          "estimate_block_scms: empty spectrogram");

  BlockScmSet set;
  set.block_len = block_len;
  set.channels = target_spec.channels;
  set.bins = target_spec.bins;
  for (int t0 = 0; t0 < target_spec.frames; t0 += block_len) {
    const int t1 = std::min(t0 + block_len, target_spec.frames);
    BlockScms b;
    b.t_begin = t0;
    b.t_end = t1;
    accumulate_scms(target_spec, t0, t1, b.target_re, b.target_im);
    accumulate_scms(noise_spec, t0, t1, b.noise_re, b.noise_im);
    set.blocks.push_back(std::move(b));
  }
  return set;
}

BeamWeights mcwf_weights(const BlockScmSet& scms, int ref_channel) {
  return compute_weights(scms, ref_channel, Backend::mcwf, mcwf_bin);
}

BeamWeights mvdr_souden_weights(const BlockScmSet& scms, int ref_channel) {
  return compute_weights(scms, ref_channel, Backend::mvdr_souden, souden_bin);
}

void validate_weights(const BeamWeights& w) {
  for (const auto& b : w.blocks) {
    require(all_finite(b.w_re) && all_finite(b.w_im), ErrorKind::numeric,
            "beam weights contain non-finite values");
    for (int f = 0; f < w.bins; ++f) {
      double norm_sq = 0.0;
      for (int m = 0; m < w.channels; ++m) {
        const std::size_t i = static_cast<std::size_t>(f) * w.channels + m;
        norm_sq += b.w_re[i] * b.w_re[i] + b.w_im[i] * b.w_im[i];
      }
      require(norm_sq <= 1e12, ErrorKind::numeric,
              "beam weight norm exceeds 1e6 at bin " + std::to_string(f));
    }
  }
}

std::vector<nn::NamedTensor> weights_to_tensors(const BeamWeights& w) {
  std::vector<nn::NamedTensor> out;
  for (std::size_t b = 0; b < w.blocks.size(); ++b) {
    const std::string base = "bf.block" + std::to_string(b);
    out.push_back({base + ".re", {w.bins, w.channels}, w.blocks[b].w_re});
    out.push_back({base + ".im", {w.bins, w.channels}, w.blocks[b].w_im});
  }
  return out;
}

dsp::Spectrogram apply_weights(const BeamWeights& w, const dsp::Spectrogram& y) {
  require(w.channels == y.channels && w.bins == y.bins, ErrorKind::data,
          "apply_weights: channel/bin mismatch");
  check_block_tiling(w, y.frames);
  dsp::Spectrogram out = dsp::Spectrogram::zeros(y.cfg, 1, y.frames);
  for (const auto& b : w.blocks) {
    for (int t = b.t_begin; t < b.t_end; ++t) {
      for (int m = 0; m < w.channels; ++m) {
        const double* yre = y.re.data() + y.idx(m, t, 0);
        const double* yim = y.im.data() + y.idx(m, t, 0);
        for (int f = 0; f < w.bins; ++f) {
          const std::size_t wi = static_cast<std::size_t>(f) * w.channels + m;
          const double wr = b.w_re[wi];
          const double wim = b.w_im[wi];
          // conj(w) * y
          out.at_re(0, t, f) += wr * yre[f] + wim * yim[f];
          out.at_im(0, t, f) += wr * yim[f] - wim * yre[f];
        }
      }
    }
  }
  return out;
}

nn::Tensor apply_weights_op(const BeamWeights& w, const nn::Tensor& y) {
  require(y.rank() == 3 && y.dim(0) == 2 * w.channels && y.dim(2) == w.bins,
          ErrorKind::numeric, "apply_weights_op: expects [2M,T,F]");
  const int frames = static_cast<int>(y.dim(1));
  const int bins = w.bins;
  const int channels = w.channels;
  check_block_tiling(w, frames);
  const std::int64_t plane = static_cast<std::int64_t>(frames) * bins;

  std::vector<double> out(2 * plane, 0.0);
  const auto& v = y.data();
  for (const auto& b : w.blocks) {
    for (int t = b.t_begin; t < b.t_end; ++t) {
      double* ore = out.data() + static_cast<std::int64_t>(t) * bins;
      double* oim = out.data() + plane + static_cast<std::int64_t>(t) * bins;
      for (int m = 0; m < channels; ++m) {
        const double* yre = v.data() + (2 * m) * plane + static_cast<std::int64_t>(t) * bins;
        const double* yim = v.data() + (2 * m + 1) * plane + static_cast<std::int64_t>(t) * bins;
        const double* wre = b.w_re.data();
        const double* wim = b.w_im.data();
        for (int f = 0; f < bins; ++f) {
          const std::size_t wi = static_cast<std::size_t>(f) * channels + m;
          ore[f] += wre[wi] * yre[f] + wim[wi] * yim[f];
          oim[f] += wre[wi] * yim[f] - wim[wi] * yre[f];
        }
      }
    }
  }

  auto weights = std::make_shared<BeamWeights>(w);
  return nn::make_op(
      {2, frames, bins}, std::move(out), {y},
      [weights, plane, bins, channels](nn::TensorNode& self) {
        auto& gy = self.parents[0]->grad;
        for (const auto& b : weights->blocks) {
          for (int t = b.t_begin; t < b.t_end; ++t) {
            const double* gor = self.grad.data() + static_cast<std::int64_t>(t) * bins;
            const double* goi = self.grad.data() + plane + static_cast<std::int64_t>(t) * bins;
            for (int m = 0; m < channels; ++m) {
              double* gyr = gy.data() + (2 * m) * plane + static_cast<std::int64_t>(t) * bins;
              double* gyi = gy.data() + (2 * m + 1) * plane + static_cast<std::int64_t>(t) * bins;
              for (int f = 0; f < bins; ++f) {
                const std::size_t wi = static_cast<std::size_t>(f) * channels + m;
                const double wr = b.w_re[wi];
                const double wim = b.w_im[wi];
                gyr[f] += wr * gor[f] - wim * goi[f];
                gyi[f] += wim * gor[f] + wr * goi[f];
              }
            }
          }
        }
      });
}

McseSplit oracle_mcse(const scene::AudioScene& scene, OracleMode mode,
                      const std::vector<int>& channels,
                      const dsp::StftConfig& cfg) {
  if (mode == OracleMode::exact) {
    McseSplit split;
    split.target = dsp::stft(scene::select_channels(scene.x, channels), cfg);
    dsp::MultiWave residual;
    residual.sample_rate = scene.y.sample_rate;
    for (int c : channels) {
      std::vector<double> sum(scene.y.channels[c].size());
      kernels::add(scene.x_rev.channels[c].data(), scene.n.channels[c].data(),
                   sum.data(), sum.size());
      residual.channels.push_back(std::move(sum));
    }
    split.noise = dsp::stft(residual, cfg);
    return split;
  }
  const auto y_spec = dsp::stft(scene::select_channels(scene.y, channels), cfg);
  return mask_split(y_spec, oracle_irm_ref(scene, cfg));
}

std::vector<double> oracle_irm_ref(const scene::AudioScene& scene,
                                   const dsp::StftConfig& cfg) {
  const int ref = scene.ref_channel;
  dsp::MultiWave ref_x = scene::select_channels(scene.x, {ref});
  dsp::MultiWave ref_v;
  ref_v.sample_rate = scene.y.sample_rate;
  {
    std::vector<double> sum(scene.y.channels[ref].size());
    kernels::add(scene.x_rev.channels[ref].data(), scene.n.channels[ref].data(),
                 sum.data(), sum.size());
    ref_v.channels.push_back(std::move(sum));
  }
  const auto sx = dsp::stft(ref_x, cfg);
  const auto sv = dsp::stft(ref_v, cfg);
  std::vector<double> mask(sx.re.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double ax = std::hypot(sx.re[i], sx.im[i]);
    const double av = std::hypot(sv.re[i], sv.im[i]);
    mask[i] = ax / (ax + av + 1e-300);
  }
  return mask;
}

McseSplit mask_split(const dsp::Spectrogram& y, const std::vector<double>& mask) {
  require(mask.size() == static_cast<std::size_t>(y.frames) * y.bins,
          ErrorKind::data, "mask_split: mask shape mismatch");
  McseSplit split;
  split.target = y;
  split.noise = y;
  const std::size_t plane = mask.size();
  for (int c = 0; c < y.channels; ++c) {
    for (std::size_t i = 0; i < plane; ++i) {
      const std::size_t k = static_cast<std::size_t>(c) * plane + i;
      split.target.re[k] = y.re[k] * mask[i];
      split.target.im[k] = y.im[k] * mask[i];
      split.noise.re[k] = y.re[k] * (1.0 - mask[i]);
      split.noise.im[k] = y.im[k] * (1.0 - mask[i]);
    }
  }
  return split;
}

}  // namespace vmbeam::bf
