// vmbeam/sm/train.cpp
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

#include "vmbeam/sm/train.hpp"

#include <cmath>

#include "vmbeam/dsp/stft_ops.hpp"
#include "vmbeam/kernels/kernels.hpp"

namespace vmbeam::sm {

namespace {

using nn::Tensor;

std::vector<double> trim(const std::vector<double>& x, std::int64_t begin,
                         std::int64_t end) {
  return std::vector<double>(x.begin() + begin, x.begin() + end);
}

Tensor trim_op(const Tensor& t, std::int64_t begin, std::int64_t end) {
  return nn::slice_cols(t, begin, end - begin);
}

// v-hat spec -> trimmed time estimate [M_v, L'].
Tensor vme_time_estimate(const VmEstimate& est, const TrainConfig& cfg,
                         int frames) {
  Tensor time = dsp::istft_op(est.v_hat_spec, cfg.stft);
  const auto [lo, hi] = dsp::reconstructable_range(frames, cfg.stft);
  return trim_op(time, lo, hi);
}

}  // namespace

TrainScene prepare_train_scene(const scene::AudioScene& scene,
                               const TrainConfig& cfg) {
  TrainScene out;
  const auto& stft_cfg = cfg.stft;

  const auto r_wave = scene::select_channels(scene.y, scene.rm_channels);
  const auto v_wave = scene::select_channels(scene.y, scene.vm_channels);
  const auto r_spec = dsp::stft(r_wave, stft_cfg);
  const auto v_spec = dsp::stft(v_wave, stft_cfg);
  out.frames = r_spec.frames;
  out.r_spec = dsp::spectrogram_to_tensor(r_spec);
  out.v_true_mag = nn::complex_magnitude(dsp::spectrogram_to_tensor(v_spec));

  const auto [lo, hi] = dsp::reconstructable_range(out.frames, stft_cfg);
  for (int c : scene.vm_channels) {
    out.vm_ref_time.push_back(trim(scene.y.channels[c], lo, hi));
  }
  out.x_ref_time = trim(scene.x.channels[scene.ref_channel], lo, hi);

  // Oracle exact split over the pipeline channel order [r..., v...].
  std::vector<int> channels = scene.rm_channels;
  if (cfg.vm_in_beamformer) {
    channels.insert(channels.end(), scene.vm_channels.begin(),
                    scene.vm_channels.end());
  }
  const auto split =
      bf::oracle_mcse(scene, bf::OracleMode::exact, channels, stft_cfg);
  const auto scms = bf::estimate_block_scms(split.target, split.noise,
                                            cfg.block_len);
  out.weights = cfg.backend == bf::Backend::mvdr_souden
                    ? bf::mvdr_souden_weights(scms, 0)
                    : bf::mcwf_weights(scms, 0);
  return out;
}

StepRecord train_step(const std::vector<TrainScene>& batch, Generator& gen,
                      Discriminator& disc, TrainState& state,
                      const TrainConfig& cfg) {
  require(!batch.empty(), ErrorKind::config, "train_step: empty batch");
  cfg.loss.validate();
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  StepRecord rec;
  rec.step = state.step + 1;

  // ---- generator pass ----
  gen.params().zero_grads();
  disc.params().zero_grads();
  Tensor gen_total = Tensor::scalar(0.0);
  std::vector<Tensor> fake_mags;  // reused detached for the discriminator pass
  fake_mags.reserve(batch.size());
  for (const auto& s : batch) {
    VmEstimate est = gen.forward(s.r_spec);
    Tensor vme_time = vme_time_estimate(est, cfg, s.frames);

    Tensor bf_time;
    {
      Tensor ybar = cfg.vm_in_beamformer
                        ? nn::concat_channels({s.r_spec, est.v_hat_spec})
                        : s.r_spec;
      Tensor bf_spec = bf::apply_weights_op(s.weights, ybar);
      Tensor full = dsp::istft_op(bf_spec, cfg.stft);
      const auto [lo, hi] = dsp::reconstructable_range(s.frames, cfg.stft);
      bf_time = trim_op(full, lo, hi);
    }

    Tensor d_fake, d_real, d_fake_det;
    Tensor fake_mag;
    if (cfg.loss.gan_enabled()) {
      fake_mag = nn::complex_magnitude(est.v_hat_spec);
      d_fake = disc.forward(s.v_true_mag, fake_mag);
      fake_mags.push_back(nn::detach(fake_mag));
    }

    CompositeLoss parts =
        composite_loss(vme_time, s.vm_ref_time, bf_time, s.x_ref_time, d_fake,
                       Tensor(), Tensor(),
                       LossConfig{cfg.loss.w_vme, cfg.loss.w_bf,
                                  cfg.loss.w_adv_g, 0.0, cfg.loss.snr_clip_db});
    gen_total = nn::add(gen_total, parts.gen_loss);
    rec.vme_loss += parts.vme_loss * inv_b;
    rec.bf_loss += parts.bf_loss * inv_b;
    rec.adv_g += parts.adv_g * inv_b;
  }
  gen_total = nn::scale(gen_total, inv_b);
  rec.gen_loss = gen_total.item();
  require(std::isfinite(rec.gen_loss), ErrorKind::numeric,
          "train_step: non-finite generator loss");
  nn::backward(gen_total);

  double gnorm_sq = 0.0;
  for (const auto& [name, t] : gen.params().items()) {
    gnorm_sq += kernels::sum_sq(t.grad().data(), t.grad().size());
  }
  rec.grad_norm = std::sqrt(gnorm_sq);
  nn::adam_step(gen.params(), state.gen_opt);

  // ---- discriminator pass (detached fakes) ----
  if (cfg.loss.gan_enabled()) {
    disc.params().zero_grads();
    Tensor disc_total = Tensor::scalar(0.0);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Tensor d_real = disc.forward(batch[i].v_true_mag, batch[i].v_true_mag);
      Tensor d_fake = disc.forward(batch[i].v_true_mag, fake_mags[i]);
      Tensor term = lsgan_discriminator_term(d_real, d_fake);
      rec.adv_d += term.item() * inv_b;
      disc_total = nn::add(disc_total, nn::scale(term, cfg.loss.w_adv_d));
    }
    disc_total = nn::scale(disc_total, inv_b);
    rec.disc_loss = disc_total.item();
    require(std::isfinite(rec.disc_loss), ErrorKind::numeric,
            "train_step: non-finite discriminator loss");
    nn::backward(disc_total);
    nn::adam_step(disc.params(), state.disc_opt);
  }

  state.step += 1;
  return rec;
}

double vme_snr_db(const TrainScene& scene, const Generator& gen,
                  const TrainConfig& cfg) {
  VmEstimate est = gen.forward(scene.r_spec);
  Tensor time = vme_time_estimate(est, cfg, scene.frames);
  const std::int64_t len = time.dim(1);
  double acc = 0.0;
  for (std::size_t c = 0; c < scene.vm_ref_time.size(); ++c) {
    const auto& ref = scene.vm_ref_time[c];
    const double* estp = time.data().data() + static_cast<std::int64_t>(c) * len;
    double p_ref = kernels::sum_sq(ref.data(), ref.size());
    double p_err = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double e = ref[i] - estp[i];
      p_err += e * e;
    }
    acc += 10.0 * std::log10(p_ref / std::max(p_err, 1e-300));
  }
  return acc / static_cast<double>(scene.vm_ref_time.size());
}

void pack_adam(std::vector<nn::NamedTensor>& out, const nn::AdamState& opt,
               const nn::ParamStore& store, const std::string& prefix) {
  require(opt.first_moment.empty() ||
              opt.first_moment.size() == store.items().size(),
          ErrorKind::numeric, "optimizer state inconsistent with params");
  const bool fresh = opt.first_moment.empty();
  for (std::size_t i = 0; i < store.items().size(); ++i) {
    const auto& [name, t] = store.items()[i];
    const std::vector<double> zeros(t.numel(), 0.0);
    out.push_back({prefix + "m." + name, t.shape(),
                   fresh ? zeros : opt.first_moment[i]});
    out.push_back({prefix + "v." + name, t.shape(),
                   fresh ? zeros : opt.second_moment[i]});
  }
  out.push_back({prefix + "step", {1}, {static_cast<double>(opt.step_count)}});
}

void unpack_adam(const std::vector<nn::NamedTensor>& tensors,
                 nn::AdamState& opt, const nn::ParamStore& store,
                 const std::string& prefix) {
  auto find = [&tensors](const std::string& name) -> const nn::NamedTensor* {
    for (const auto& t : tensors) {
      if (t.name == name) return &t;
    }
    return nullptr;
  };
  const auto* step = find(prefix + "step");
  require(step != nullptr, ErrorKind::data,
          "checkpoint missing optimizer state: " + prefix + "step");
  opt.step_count = static_cast<std::int64_t>(step->data.at(0));
  opt.first_moment.clear();
  opt.second_moment.clear();
  for (const auto& [name, t] : store.items()) {
    const auto* m = find(prefix + "m." + name);
    const auto* v = find(prefix + "v." + name);
    require(m && v, ErrorKind::data,
            "checkpoint missing optimizer moments for " + name);
    require(m->shape == t.shape() && v->shape == t.shape(), ErrorKind::data,
            "optimizer moment shape mismatch for " + name);
    opt.first_moment.push_back(m->data);
    opt.second_moment.push_back(v->data);
  }
}

std::vector<nn::NamedTensor> pack_training_state(const Generator& gen,
                                                 const Discriminator& disc,
                                                 const TrainState& state) {
  std::vector<nn::NamedTensor> out = gen.dump_params("gen.");
  for (auto& t : disc.dump_params("disc.")) out.push_back(std::move(t));
  pack_adam(out, state.gen_opt, gen.params(), "opt.gen.");
  pack_adam(out, state.disc_opt, disc.params(), "opt.disc.");
  out.push_back({"meta.step", {1}, {static_cast<double>(state.step)}});
  return out;
}

void unpack_training_state(const std::vector<nn::NamedTensor>& tensors,
                           Generator& gen, Discriminator& disc,
                           TrainState& state) {
  gen.load_params(tensors, "gen.");
  disc.load_params(tensors, "disc.");
  unpack_adam(tensors, state.gen_opt, gen.params(), "opt.gen.");
  unpack_adam(tensors, state.disc_opt, disc.params(), "opt.disc.");
  const nn::NamedTensor* step = nullptr;
  for (const auto& t : tensors) {
    if (t.name == "meta.step") step = &t;
  }
  require(step != nullptr, ErrorKind::data, "checkpoint missing meta.step");
  state.step = static_cast<std::int64_t>(step->data.at(0));
}

}  // namespace vmbeam::sm
