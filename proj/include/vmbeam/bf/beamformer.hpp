// vmbeam/bf/beamformer.hpp
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

#ifndef VMBEAM_BF_BEAMFORMER_HPP_
#define VMBEAM_BF_BEAMFORMER_HPP_

#include <string>
#include <vector>

#include "vmbeam/dsp/stft.hpp"
#include "vmbeam/nn/checkpoint.hpp"
#include "vmbeam/nn/tensor.hpp"
#include "vmbeam/scene/scene.hpp"

namespace vmbeam::bf {

// Dense complex matrix over split re/im planes, row-major n x n.
struct CMat {
  int n = 0;
  std::vector<double> re, im;

  static CMat zeros(int n) {
    CMat m;
    m.n = n;
    m.re.assign(static_cast<std::size_t>(n) * n, 0.0);
    m.im.assign(m.re.size(), 0.0);
    return m;
  }
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * n + j;
  }
};

// Relative diagonal loading before inversion: delta = rel * trace(A)/n.
// 1e-9 keeps rank-deficient block estimates invertible while staying far
// below the 1e-8 distortion budget the weight contracts promise.
constexpr double kDiagLoadRel = 1e-9;

// Solve (A + delta I) X = B for Hermitian A; Cholesky with a partial-pivot
// LU fallback. Throws ErrorKind::numeric when singular even after loading.
CMat solve_hermitian_loaded(const CMat& a, const CMat& b, double rel_load);
CMat matmul(const CMat& a, const CMat& b);

// Eigenvalues of a Hermitian matrix (ascending), via Jacobi on the real
// symmetric embedding; each eigenvalue appears twice in the embedding and is
// reported once.
std::vector<double> hermitian_eigenvalues(const CMat& a);

// Per-block SCMs stored as [M*M*F] planes indexed ((m1*M+m2)*F + f),
// Hermitian by construction (upper triangle computed, mirrored exactly).
struct BlockScms {
  int t_begin = 0, t_end = 0;
  std::vector<double> target_re, target_im;
  std::vector<double> noise_re, noise_im;
};

struct BlockScmSet {
  int block_len = 25;
  int channels = 0;
  int bins = 0;
  std::vector<BlockScms> blocks;

  CMat target_at(int block, int f) const;
  CMat noise_at(int block, int f) const;
};

// Mean outer product v v^H per block and bin; the final partial block is
// kept. target and noise must share (M, T, F).
BlockScmSet estimate_block_scms(const dsp::Spectrogram& target_spec,
                                const dsp::Spectrogram& noise_spec,
                                int block_len);

enum class Backend { mcwf, mvdr_souden, none };
std::string backend_name(Backend b);
Backend backend_from_name(const std::string& name);

struct BeamWeights {
  Backend backend = Backend::mcwf;
  int ref_channel = 0;
  int channels = 0;
  int bins = 0;
  struct Block {
    int t_begin = 0, t_end = 0;
    std::vector<double> w_re, w_im;  // [F*M], w for bin f at f*M + m
  };
  std::vector<Block> blocks;
};

// Full-rank MCWF: w = (Phi_x + Phi_n + delta I)^{-1} Phi_x e_ref per bin.
BeamWeights mcwf_weights(const BlockScmSet& scms, int ref_channel);

// Souden MVDR: w = (Phi_n^{-1} Phi_x / trace(Phi_n^{-1} Phi_x)) e_ref.
// Zero trace at any bin is an error (message carries the bin index).
BeamWeights mvdr_souden_weights(const BlockScmSet& scms, int ref_channel);

// Throws unless every weight is finite and every per-bin norm is <= 1e6.
void validate_weights(const BeamWeights& w);

// Debug dump into the checkpoint tensor container: per block, planes
// "bf.block<i>.re" / "bf.block<i>.im" shaped [F, M].
std::vector<nn::NamedTensor> weights_to_tensors(const BeamWeights& w);

// X_hat(t,f) = sum_m conj(w[m]) Y[m,t,f], block by block. Output has one
// channel. Block ranges must tile the spectrogram's frames exactly.
dsp::Spectrogram apply_weights(const BeamWeights& w, const dsp::Spectrogram& y);

// Same computation on a [2M,T,F] tensor with constant weights; gradients
// flow to Y through the exact adjoint. Output is [2,T,F].
nn::Tensor apply_weights_op(const BeamWeights& w, const nn::Tensor& y);

// Oracle stand-ins for the MC-SE estimate on ground-truth scenes.
//  exact:   STFTs of x and (x_rev + n) over the selected channels.
//  magmask: mixture STFT weighted by the reference-channel ideal ratio mask
//           m = |X_ref| / (|X_ref| + |V_ref|), broadcast to all channels;
//           noise side gets (1 - m).
enum class OracleMode { exact, magmask };

struct McseSplit {
  dsp::Spectrogram target;
  dsp::Spectrogram noise;
};

McseSplit oracle_mcse(const scene::AudioScene& scene, OracleMode mode,
                      const std::vector<int>& channels,
                      const dsp::StftConfig& cfg);

// Reference-channel ideal ratio mask of a scene, [T*F] in [0,1].
std::vector<double> oracle_irm_ref(const scene::AudioScene& scene,
                                   const dsp::StftConfig& cfg);

// target = mask (.) y, noise = (1-mask) (.) y, mask broadcast over channels.
McseSplit mask_split(const dsp::Spectrogram& y, const std::vector<double>& mask);

}  // namespace vmbeam::bf

#endif  // VMBEAM_BF_BEAMFORMER_HPP_
