// vmbeam/sm/gan.cpp
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

#include "vmbeam/sm/gan.hpp"

#include "vmbeam/sm/generator.hpp"

namespace vmbeam::sm {

using nn::Tensor;

Discriminator::Discriminator(DiscriminatorConfig cfg, std::uint64_t init_seed)
    : cfg_(std::move(cfg)) {
  require(cfg_.layers >= 1 && cfg_.base_channels >= 1, ErrorKind::config,
          "discriminator: bad config");
  CounterRng rng(init_seed, 0x44'49'53ULL);
  std::uint64_t idx = 0;
  int in_c = cfg_.in_channels;
  for (int l = 0; l < cfg_.layers; ++l) {
    const int out_c = cfg_.base_channels << l;
    auto r = rng.fork(idx++);
    params_.add("conv" + std::to_string(l) + ".w",
                nn::init_uniform({out_c, in_c, 3, 3}, in_c * 9, r));
    params_.add("conv" + std::to_string(l) + ".b",
                nn::init_uniform({out_c}, in_c * 9, r));
    in_c = out_c;
  }
  auto r = rng.fork(idx++);
  params_.add("final.w", nn::init_uniform({1, in_c}, in_c, r));
  params_.add("final.b", nn::init_uniform({1}, in_c, r));
}

Tensor Discriminator::forward(const Tensor& ref_mag, const Tensor& est_mag) const {
  require(ref_mag.shape() == est_mag.shape() && ref_mag.rank() == 3,
          ErrorKind::numeric, "discriminator: magnitude shape mismatch");
  Tensor h = nn::concat_channels({ref_mag, est_mag});
  require(h.dim(0) == cfg_.in_channels, ErrorKind::numeric,
          "discriminator: channel count does not match config");
  for (int l = 0; l < cfg_.layers; ++l) {
    const std::string name = "conv" + std::to_string(l);
    h = nn::mish(nn::conv2d(h, params_.at(name + ".w"), params_.at(name + ".b"),
                            2, 1, 1));
  }
  Tensor pooled = nn::global_avg_pool(h);
  return nn::linear(params_.at("final.w"), pooled, params_.at("final.b"));
}

void Discriminator::load_params(const std::vector<nn::NamedTensor>& tensors,
                                const std::string& prefix) {
  load_into_store(params_, tensors, prefix);
}

std::vector<nn::NamedTensor> Discriminator::dump_params(
    const std::string& prefix) const {
  return dump_store(params_, prefix);
}

Tensor lsgan_generator_term(const Tensor& d_fake) {
  Tensor diff = nn::add_scalar(d_fake, -1.0);
  return nn::scale(nn::mul(diff, diff), 0.5);
}

Tensor lsgan_discriminator_term(const Tensor& d_real, const Tensor& d_fake) {
  Tensor real_diff = nn::add_scalar(d_real, -1.0);
  Tensor real_term = nn::mul(real_diff, real_diff);
  Tensor fake_term = nn::mul(d_fake, d_fake);
  return nn::scale(nn::add(real_term, fake_term), 0.5);
}

Tensor multichannel_snr_loss(const Tensor& est,
                             const std::vector<std::vector<double>>& refs,
                             double clip_db) {
  require(est.rank() == 2 &&
              est.dim(0) == static_cast<std::int64_t>(refs.size()),
          ErrorKind::numeric, "multichannel_snr_loss: channel mismatch");
  Tensor total;
  for (std::size_t c = 0; c < refs.size(); ++c) {
    Tensor chan = nn::slice_channels(est, static_cast<std::int64_t>(c), 1);
    Tensor loss = nn::snr_loss(chan, refs[c], clip_db);
    total = c == 0 ? loss : nn::add(total, loss);
  }
  return nn::scale(total, 1.0 / static_cast<double>(refs.size()));
}

CompositeLoss composite_loss(const Tensor& vme_time,
                             const std::vector<std::vector<double>>& vme_refs,
                             const Tensor& bf_time,
                             const std::vector<double>& bf_ref,
                             const Tensor& d_fake_for_gen, const Tensor& d_real,
                             const Tensor& d_fake_detached,
                             const LossConfig& cfg) {
  cfg.validate();
  CompositeLoss out;

  Tensor gen = Tensor::scalar(0.0);
  if (cfg.w_vme > 0.0) {
    Tensor vme = multichannel_snr_loss(vme_time, vme_refs, cfg.snr_clip_db);
    out.vme_loss = vme.item();
    gen = nn::add(gen, nn::scale(vme, cfg.w_vme));
  }
  if (cfg.w_bf > 0.0) {
    require(bf_time.rank() == 2 && bf_time.dim(0) == 1, ErrorKind::numeric,
            "composite_loss: bf estimate must be [1, L]");
    Tensor bf = nn::snr_loss(bf_time, bf_ref, cfg.snr_clip_db);
    out.bf_loss = bf.item();
    gen = nn::add(gen, nn::scale(bf, cfg.w_bf));
  }
  if (cfg.w_adv_g > 0.0) {
    require(d_fake_for_gen.defined(), ErrorKind::numeric,
            "composite_loss: adversarial weight set but no fake score");
    Tensor adv = lsgan_generator_term(d_fake_for_gen);
    out.adv_g = adv.item();
    gen = nn::add(gen, nn::scale(adv, cfg.w_adv_g));
  }
  out.gen_loss = gen;

  if (cfg.w_adv_d > 0.0) {
    require(d_real.defined() && d_fake_detached.defined(), ErrorKind::numeric,
            "composite_loss: adversarial weight set but no real/fake scores");
    Tensor adv = lsgan_discriminator_term(d_real, d_fake_detached);
    out.adv_d = adv.item();
    out.disc_loss = nn::scale(adv, cfg.w_adv_d);
  }
  return out;
}

}  // namespace vmbeam::sm
