// vmbeam/sarl/pipeline.cpp
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

#include "vmbeam/sarl/pipeline.hpp"

#include <cmath>

#include "vmbeam/dsp/stft_ops.hpp"
#include "vmbeam/kernels/kernels.hpp"

namespace vmbeam::sarl {

namespace {

using nn::Tensor;

std::vector<double> trim(const std::vector<double>& x, std::int64_t lo,
                         std::int64_t hi) {
  return std::vector<double>(x.begin() + lo, x.begin() + hi);
}

// Learned mask: |x_se| / |y_ref|, clamped to [0, 1].
std::vector<double> mask_from_estimate(const dsp::Spectrogram& se_spec,
                                       const dsp::Spectrogram& ybar_spec) {
  const std::size_t plane =
      static_cast<std::size_t>(se_spec.frames) * se_spec.bins;
  std::vector<double> mask(plane);
  for (std::size_t i = 0; i < plane; ++i) {
    const double a = std::hypot(se_spec.re[i], se_spec.im[i]);
    const double b = std::hypot(ybar_spec.re[i], ybar_spec.im[i]);
    mask[i] = std::min(a / (b + 1e-12), 1.0);
  }
  return mask;
}

}  // namespace

std::string conditioning_name(Conditioning c) {
  switch (c) {
    case Conditioning::none: return "none";
    case Conditioning::sarl_s: return "sarl_s";
    case Conditioning::sarl_f: return "sarl_f";
  }
  return "?";
}

Conditioning conditioning_from_name(const std::string& name) {
  if (name == "none") return Conditioning::none;
  if (name == "sarl_s") return Conditioning::sarl_s;
  if (name == "sarl_f") return Conditioning::sarl_f;
  throw Error(ErrorKind::config, "unknown conditioning: " + name);
}

std::string vm_source_name(VmSource s) {
  switch (s) {
    case VmSource::generator: return "generator";
    case VmSource::oracle_true: return "oracle_true";
    case VmSource::none: return "none";
  }
  return "?";
}

VmSource vm_source_from_name(const std::string& name) {
  if (name == "generator") return VmSource::generator;
  if (name == "oracle_true") return VmSource::oracle_true;
  if (name == "none") return VmSource::none;
  throw Error(ErrorKind::config, "unknown vm_source: " + name);
}

std::string mask_source_name(MaskSource s) {
  switch (s) {
    case MaskSource::oracle_exact: return "oracle_exact";
    case MaskSource::oracle_magmask: return "oracle_magmask";
    case MaskSource::learned: return "learned";
  }
  return "?";
}

MaskSource mask_source_from_name(const std::string& name) {
  if (name == "oracle_exact") return MaskSource::oracle_exact;
  if (name == "oracle_magmask") return MaskSource::oracle_magmask;
  if (name == "learned") return MaskSource::learned;
  throw Error(ErrorKind::config, "unknown mask_source: " + name);
}

Tensor sarl_s_enhance(const Tensor& r_spec, const Tensor& vhat_spec,
                      const McseModel& mcse) {
  Tensor ybar = nn::concat_channels({r_spec, vhat_spec});
  return mcse.forward(ybar);
}

Tensor sarl_f_enhance(const Tensor& r_spec, const Tensor& f_vhat,
                      const McseModel& mcse) {
  Tensor fused = nn::add(mcse.encode(r_spec), f_vhat);
  Tensor ref = nn::slice_channels(r_spec, 0, 2);
  return mcse.decode(fused, ref);
}

PipelineResult vm_bf_pipeline(const scene::AudioScene& scene,
                              const sm::Generator* gen, const McseModel* mcse,
                              const PipelineConfig& cfg) {
  const auto& stft_cfg = cfg.stft;
  const auto r_wave = scene::select_channels(scene.y, scene.rm_channels);
  const auto r_spec_plain = dsp::stft(r_wave, stft_cfg);
  Tensor r_spec = dsp::spectrogram_to_tensor(r_spec_plain);
  const int frames = r_spec_plain.frames;

  // Estimated (or oracle) VM channels.
  Tensor vhat_spec;
  Tensor f_vhat;
  if (cfg.vm_source == VmSource::generator) {
    require(gen != nullptr, ErrorKind::config,
            "pipeline needs a generator for vm_source=generator");
    sm::VmEstimate est = gen->forward(r_spec);
    vhat_spec = nn::detach(est.v_hat_spec);
    f_vhat = nn::detach(est.f_vhat);
  } else if (cfg.vm_source == VmSource::oracle_true) {
    vhat_spec = dsp::spectrogram_to_tensor(
        dsp::stft(scene::select_channels(scene.y, scene.vm_channels), stft_cfg));
  }

  const bool has_vm = vhat_spec.defined();
  Tensor ybar = has_vm ? nn::concat_channels({r_spec, vhat_spec}) : r_spec;
  const dsp::Spectrogram ybar_spec = dsp::tensor_to_spectrogram(ybar, stft_cfg);

  // MC-SE estimate at the reference channel.
  dsp::Spectrogram se_spec;
  const bool need_se =
      cfg.backend == bf::Backend::none || cfg.mask_source == MaskSource::learned;
  if (need_se) {
    require(mcse != nullptr, ErrorKind::config,
            "pipeline needs an MC-SE model for this configuration");
    Tensor se;
    switch (cfg.conditioning) {
      case Conditioning::sarl_f:
        require(cfg.vm_source == VmSource::generator, ErrorKind::config,
                "sarl_f conditioning needs generator features");
        se = sarl_f_enhance(r_spec, f_vhat, *mcse);
        break;
      case Conditioning::sarl_s:
        require(has_vm, ErrorKind::config,
                "sarl_s conditioning needs VM channels");
        se = sarl_s_enhance(r_spec, vhat_spec, *mcse);
        break;
      case Conditioning::none:
        se = mcse->forward(has_vm &&
                                   mcse->config().in_channels ==
                                       ybar.dim(0) / 2
                               ? ybar
                               : r_spec);
        break;
    }
    se_spec = dsp::tensor_to_spectrogram(nn::detach(se), stft_cfg);
  }

  PipelineResult out;
  out.frames = frames;
  if (cfg.backend == bf::Backend::none) {
    out.enhanced_spec = se_spec;
    out.enhanced = dsp::istft(se_spec).channels[0];
    return out;
  }

  // Channel set used by the spatial stage ("w/o VM signals" keeps r only).
  const dsp::Spectrogram& bf_input =
      cfg.vm_in_beamformer ? ybar_spec : r_spec_plain;

  bf::McseSplit split;
  switch (cfg.mask_source) {
    case MaskSource::oracle_exact: {
      std::vector<int> channels = scene.rm_channels;
      if (cfg.vm_in_beamformer && has_vm) {
        channels.insert(channels.end(), scene.vm_channels.begin(),
                        scene.vm_channels.end());
      }
      split = bf::oracle_mcse(scene, bf::OracleMode::exact, channels, stft_cfg);
      break;
    }
    case MaskSource::oracle_magmask:
      split = bf::mask_split(bf_input, bf::oracle_irm_ref(scene, stft_cfg));
      break;
    case MaskSource::learned:
      split = bf::mask_split(bf_input, mask_from_estimate(se_spec, ybar_spec));
      break;
  }

  const auto scms = bf::estimate_block_scms(split.target, split.noise,
                                            cfg.block_len);
  const auto weights = cfg.backend == bf::Backend::mvdr_souden
                           ? bf::mvdr_souden_weights(scms, 0)
                           : bf::mcwf_weights(scms, 0);
  out.enhanced_spec = bf::apply_weights(weights, bf_input);
  out.enhanced = dsp::istft(out.enhanced_spec).channels[0];
  return out;
}

SarlScene prepare_sarl_scene(const scene::AudioScene& scene,
                             const dsp::StftConfig& cfg) {
  SarlScene out;
  const auto r_wave = scene::select_channels(scene.y, scene.rm_channels);
  const auto v_wave = scene::select_channels(scene.y, scene.vm_channels);
  const auto r_spec = dsp::stft(r_wave, cfg);
  const auto v_spec = dsp::stft(v_wave, cfg);
  out.frames = r_spec.frames;
  out.r_spec = dsp::spectrogram_to_tensor(r_spec);
  Tensor v_true = dsp::spectrogram_to_tensor(v_spec);
  out.v_true_mag = nn::complex_magnitude(v_true);
  out.full_spec = nn::concat_channels({out.r_spec, v_true});

  const auto [lo, hi] = dsp::reconstructable_range(out.frames, cfg);
  for (int c : scene.vm_channels) {
    out.vm_ref_time.push_back(trim(scene.y.channels[c], lo, hi));
  }
  out.x_ref_time = trim(scene.x.channels[scene.ref_channel], lo, hi);
  return out;
}

double mcse_pretrain_step(const std::vector<SarlScene>& batch, McseModel& mcse,
                          nn::AdamState& opt, const dsp::StftConfig& stft,
                          double snr_clip_db, bool full_array) {
  require(!batch.empty(), ErrorKind::config, "mcse_pretrain_step: empty batch");
  mcse.params().zero_grads();
  Tensor total = Tensor::scalar(0.0);
  for (const auto& s : batch) {
    const Tensor& input = full_array ? s.full_spec : s.r_spec;
    Tensor se = mcse.forward(input);
    Tensor time = dsp::istft_op(se, stft);
    const auto [lo, hi] = dsp::reconstructable_range(s.frames, stft);
    Tensor trimmed = nn::slice_cols(time, lo, hi - lo);
    total = nn::add(total, nn::snr_loss(trimmed, s.x_ref_time, snr_clip_db));
  }
  total = nn::scale(total, 1.0 / static_cast<double>(batch.size()));
  const double loss = total.item();
  require(std::isfinite(loss), ErrorKind::numeric,
          "mcse_pretrain_step: non-finite loss");
  nn::backward(total);
  nn::adam_step(mcse.params(), opt);
  return loss;
}

sm::StepRecord sarl_train_step(const std::vector<SarlScene>& batch,
                               sm::Generator& gen, McseModel& mcse,
                               sm::Discriminator* disc, sm::TrainState& state,
                               nn::AdamState& mcse_opt,
                               const sm::TrainConfig& cfg,
                               Conditioning conditioning) {
  require(!batch.empty(), ErrorKind::config, "sarl_train_step: empty batch");
  require(conditioning != Conditioning::none, ErrorKind::config,
          "sarl_train_step: pick sarl_s or sarl_f");
  const bool gan = cfg.loss.gan_enabled() && disc != nullptr;
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  sm::StepRecord rec;
  rec.step = state.step + 1;
  gen.params().zero_grads();
  mcse.params().zero_grads();
  if (disc) disc->params().zero_grads();

  Tensor total = Tensor::scalar(0.0);
  std::vector<Tensor> fake_mags;
  for (const auto& s : batch) {
    sm::VmEstimate est = gen.forward(s.r_spec);

    Tensor se = conditioning == Conditioning::sarl_s
                    ? sarl_s_enhance(s.r_spec, est.v_hat_spec, mcse)
                    : sarl_f_enhance(s.r_spec, est.f_vhat, mcse);
    Tensor se_time = dsp::istft_op(se, cfg.stft);
    const auto [lo, hi] = dsp::reconstructable_range(s.frames, cfg.stft);
    Tensor se_trim = nn::slice_cols(se_time, lo, hi - lo);

    Tensor vme_time;
    if (cfg.loss.w_vme > 0.0) {
      Tensor t = dsp::istft_op(est.v_hat_spec, cfg.stft);
      vme_time = nn::slice_cols(t, lo, hi - lo);
    }

    Tensor d_fake, fake_mag;
    if (gan) {
      fake_mag = nn::complex_magnitude(est.v_hat_spec);
      d_fake = disc->forward(s.v_true_mag, fake_mag);
      fake_mags.push_back(nn::detach(fake_mag));
    }

    sm::CompositeLoss parts = sm::composite_loss(
        vme_time, cfg.loss.w_vme > 0.0 ? s.vm_ref_time
                                       : std::vector<std::vector<double>>{},
        se_trim, s.x_ref_time, d_fake, Tensor(), Tensor(),
        sm::LossConfig{cfg.loss.w_vme, cfg.loss.w_bf,
                       gan ? cfg.loss.w_adv_g : 0.0, 0.0,
                       cfg.loss.snr_clip_db});
    total = nn::add(total, parts.gen_loss);
    rec.vme_loss += parts.vme_loss * inv_b;
    rec.bf_loss += parts.bf_loss * inv_b;
    rec.adv_g += parts.adv_g * inv_b;
  }
  total = nn::scale(total, inv_b);
  rec.gen_loss = total.item();
  require(std::isfinite(rec.gen_loss), ErrorKind::numeric,
          "sarl_train_step: non-finite loss");
  nn::backward(total);

  double gnorm_sq = 0.0;
  for (const auto& [name, t] : gen.params().items()) {
    gnorm_sq += kernels::sum_sq(t.grad().data(), t.grad().size());
  }
  rec.grad_norm = std::sqrt(gnorm_sq);

  nn::adam_step(gen.params(), state.gen_opt);
  nn::adam_step(mcse.params(), mcse_opt);

  if (gan) {
    disc->params().zero_grads();
    Tensor disc_total = Tensor::scalar(0.0);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Tensor d_real = disc->forward(batch[i].v_true_mag, batch[i].v_true_mag);
      Tensor d_fake = disc->forward(batch[i].v_true_mag, fake_mags[i]);
      Tensor term = sm::lsgan_discriminator_term(d_real, d_fake);
      rec.adv_d += term.item() * inv_b;
      disc_total = nn::add(disc_total, nn::scale(term, cfg.loss.w_adv_d));
    }
    disc_total = nn::scale(disc_total, inv_b);
    rec.disc_loss = disc_total.item();
    nn::backward(disc_total);
    nn::adam_step(disc->params(), state.disc_opt);
  }

  state.step += 1;
  return rec;
}

}  // namespace vmbeam::sarl
