// vmbeam/sm/generator.cpp
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

#include "vmbeam/sm/generator.hpp"

#include <algorithm>

namespace vmbeam::sm {

namespace {

using nn::Tensor;

Tensor conv3(const Tensor& x, const Tensor& w, const Tensor& b, int groups) {
  const int pad = (static_cast<int>(w.dim(2)) - 1) / 2;
  return nn::conv2d(x, w, b, 1, pad, groups);
}

}  // namespace

void GeneratorConfig::validate() const {
  require(n_blocks >= 1, ErrorKind::config, "generator needs >= 1 stage");
  require(static_cast<int>(dims.size()) == n_blocks, ErrorKind::config,
          "generator: dims length must equal n_blocks");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    require(dims[i] >= 1, ErrorKind::config, "generator: dims must be positive");
    if (i > 0) {
      require(dims[i] <= dims[i - 1], ErrorKind::config,
              "generator: dims must be non-increasing");
    }
    require(dims[i] % groups == 0, ErrorKind::config,
            "generator: dims must be divisible by groups");
  }
  require(kernel % 2 == 1 && kernel >= 1, ErrorKind::config,
          "generator: kernel must be odd");
  require(m_r >= 1 && m_v >= 1 && feature_dim >= 1, ErrorKind::config,
          "generator: channel counts must be positive");
  require(dca_slots >= 1, ErrorKind::config, "generator: dca_slots must be >= 1");
}

void load_into_store(nn::ParamStore& store,
                     const std::vector<nn::NamedTensor>& tensors,
                     const std::string& prefix) {
  for (const auto& [name, t] : store.items()) {
    const std::string want = prefix + name;
    const nn::NamedTensor* found = nullptr;
    for (const auto& nt : tensors) {
      if (nt.name == want) {
        found = &nt;
        break;
      }
    }
    require(found != nullptr, ErrorKind::data,
            "checkpoint is missing tensor: " + want);
    require(found->shape == t.shape(), ErrorKind::data,
            "checkpoint tensor shape mismatch: " + want);
    t.node()->value = found->data;
  }
}

std::vector<nn::NamedTensor> dump_store(const nn::ParamStore& store,
                                        const std::string& prefix) {
  std::vector<nn::NamedTensor> out;
  out.reserve(store.items().size());
  for (const auto& [name, t] : store.items()) {
    out.push_back({prefix + name, t.shape(), t.data()});
  }
  return out;
}

Generator::Generator(GeneratorConfig cfg, std::uint64_t init_seed)
    : cfg_(std::move(cfg)) {
  cfg_.validate();
  CounterRng rng(init_seed, 0x53'4d'47ULL);  // generator init stream
  std::uint64_t idx = 0;
  auto add_conv = [&](const std::string& name, int out_c, int in_c, int k,
                      int groups) {
    auto r = rng.fork(idx++);
    const std::int64_t fan_in = static_cast<std::int64_t>(in_c / groups) * k * k;
    params_.add(name + ".w",
                nn::init_uniform({out_c, in_c / groups, k, k}, fan_in, r));
    params_.add(name + ".b", nn::init_uniform({out_c}, fan_in, r));
  };
  auto add_linear = [&](const std::string& name, int out_c, int in_c) {
    auto r = rng.fork(idx++);
    params_.add(name + ".w", nn::init_uniform({out_c, in_c}, in_c, r));
    params_.add(name + ".b", nn::init_uniform({out_c}, in_c, r));
  };

  const int k = cfg_.kernel;
  add_conv("init", cfg_.dims[0], 2 * cfg_.m_r, k, 1);
  for (int s = 0; s < cfg_.n_blocks; ++s) {
    const std::string st = "stage" + std::to_string(s);
    const int d = cfg_.dims[s];
    const int d_next = cfg_.width_after_stage(s);
    add_conv(st + ".up.proj", d, d, k, 1);
    add_conv(st + ".up.back", d, d, k, 1);
    add_conv(st + ".down.proj", d, d, k, cfg_.groups);
    add_conv(st + ".down.back", d, d, k, cfg_.groups);
    if (cfg_.enable_selection) {
      add_conv(st + ".up.sel_res", d, d, 1, 1);
      add_conv(st + ".up.sel_skip", d, d, 1, 1);
      add_conv(st + ".down.sel_res", d, d, 1, 1);
      add_conv(st + ".down.sel_skip", d, d, 1, 1);
    }
    if (cfg_.enable_dca) {
      for (int slot = 0; slot < cfg_.dca_slots; ++slot) {
        add_conv(st + ".dca.slot" + std::to_string(slot), d_next, d, 1, 1);
      }
      const int hidden = std::max(d / 4, 4);
      add_linear(st + ".dca.att1", hidden, d);
      add_linear(st + ".dca.att2", cfg_.dca_slots, hidden);
    } else {
      add_conv(st + ".reduce", d_next, d, 1, 1);
    }
  }
  const int d_last = cfg_.dims.back();
  add_conv("head.signal", 2 * cfg_.m_v, d_last, k, 1);
  add_conv("head.feature", cfg_.feature_dim, d_last, k, 1);
}

nn::Tensor selection_gate(const Tensor& features, const Tensor& w,
                          const Tensor& b) {
  return nn::mul(features, nn::mish(nn::conv2d(features, w, b, 1, 0, 1)));
}

nn::Tensor dca_forward(const Tensor& features,
                       const std::vector<Tensor>& kernels,
                       const std::vector<Tensor>& biases,
                       const Tensor& att_w1, const Tensor& att_b1,
                       const Tensor& att_w2, const Tensor& att_b2,
                       Tensor* attention_out) {
  require(!kernels.empty() && kernels.size() == biases.size(),
          ErrorKind::config, "dca: no kernel slots");
  const Tensor pooled = nn::global_avg_pool(features);
  const Tensor h = nn::mish(nn::linear(att_w1, pooled, att_b1));
  const Tensor attention = nn::softmax(nn::linear(att_w2, h, att_b2));
  if (attention_out) *attention_out = attention;

  Tensor mixed_w = nn::scale_by(kernels[0], nn::index(attention, 0));
  Tensor mixed_b = nn::scale_by(biases[0], nn::index(attention, 0));
  for (std::size_t s = 1; s < kernels.size(); ++s) {
    mixed_w = nn::add(mixed_w,
                      nn::scale_by(kernels[s], nn::index(attention, s)));
    mixed_b = nn::add(mixed_b,
                      nn::scale_by(biases[s], nn::index(attention, s)));
  }
  return nn::conv2d(features, mixed_w, mixed_b, 1, 0, 1);
}

VmEstimate Generator::forward(const Tensor& r_spec) const {
  require(r_spec.rank() == 3 && r_spec.dim(0) == 2 * cfg_.m_r,
          ErrorKind::numeric,
          "generator: input must be [2*M_r, T, F]");
  const auto& p = params_;

  Tensor h = nn::mish(conv3(r_spec, p.at("init.w"), p.at("init.b"), 1));
  for (int s = 0; s < cfg_.n_blocks; ++s) {
    const std::string st = "stage" + std::to_string(s);
    // Up block: back-projection with residual addition.
    {
      Tensor proj = nn::mish(conv3(h, p.at(st + ".up.proj.w"),
                                   p.at(st + ".up.proj.b"), 1));
      Tensor back = nn::mish(conv3(proj, p.at(st + ".up.back.w"),
                                   p.at(st + ".up.back.b"), 1));
      if (cfg_.enable_selection) {
        back = selection_gate(back, p.at(st + ".up.sel_res.w"),
                              p.at(st + ".up.sel_res.b"));
        Tensor skip = selection_gate(h, p.at(st + ".up.sel_skip.w"),
                                     p.at(st + ".up.sel_skip.b"));
        h = nn::add(back, skip);
      } else {
        h = nn::add(back, h);
      }
    }
    // Down block: grouped convs, residual subtraction.
    {
      Tensor proj = nn::mish(conv3(h, p.at(st + ".down.proj.w"),
                                   p.at(st + ".down.proj.b"), cfg_.groups));
      Tensor back = nn::mish(conv3(proj, p.at(st + ".down.back.w"),
                                   p.at(st + ".down.back.b"), cfg_.groups));
      if (cfg_.enable_selection) {
        back = selection_gate(back, p.at(st + ".down.sel_res.w"),
                              p.at(st + ".down.sel_res.b"));
        Tensor skip = selection_gate(h, p.at(st + ".down.sel_skip.w"),
                                     p.at(st + ".down.sel_skip.b"));
        h = nn::sub(back, skip);
      } else {
        h = nn::sub(back, h);
      }
    }
    // Channel compression.
    if (cfg_.enable_dca) {
      std::vector<Tensor> kernels, biases;
      for (int slot = 0; slot < cfg_.dca_slots; ++slot) {
        const std::string base = st + ".dca.slot" + std::to_string(slot);
        kernels.push_back(p.at(base + ".w"));
        biases.push_back(p.at(base + ".b"));
      }
      h = dca_forward(h, kernels, biases, p.at(st + ".dca.att1.w"),
                      p.at(st + ".dca.att1.b"), p.at(st + ".dca.att2.w"),
                      p.at(st + ".dca.att2.b"));
    } else {
      h = nn::conv2d(h, p.at(st + ".reduce.w"), p.at(st + ".reduce.b"), 1, 0, 1);
    }
  }

  VmEstimate est;
  est.v_hat_spec = conv3(h, p.at("head.signal.w"), p.at("head.signal.b"), 1);
  est.f_vhat = conv3(h, p.at("head.feature.w"), p.at("head.feature.b"), 1);
  return est;
}

void Generator::load_params(const std::vector<nn::NamedTensor>& tensors,
                            const std::string& prefix) {
  load_into_store(params_, tensors, prefix);
}

std::vector<nn::NamedTensor> Generator::dump_params(
    const std::string& prefix) const {
  return dump_store(params_, prefix);
}

}  // namespace vmbeam::sm
