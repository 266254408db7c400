// tests/test_sm.cpp
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "vmbeam/nn/grad_check.hpp"
#include "vmbeam/sm/train.hpp"

using namespace vmbeam;
using nn::Tensor;

namespace {

Tensor random_tensor(std::vector<std::int64_t> shape, std::uint64_t seed) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  CounterRng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return Tensor::from_data(std::move(shape), std::move(v));
}

void zero_param(nn::ParamStore& store, const std::string& name) {
  auto t = store.at(name);
  std::fill(t.mutable_data().begin(), t.mutable_data().end(), 0.0);
}

// Independent per-layer parameter count.
std::int64_t expected_param_count(const sm::GeneratorConfig& c) {
  auto conv = [](int out, int in, int k, int groups) {
    return static_cast<std::int64_t>(out) * (in / groups) * k * k + out;
  };
  const int k = c.kernel;
  std::int64_t total = conv(c.dims[0], 2 * c.m_r, k, 1);
  for (int s = 0; s < c.n_blocks; ++s) {
    const int d = c.dims[s];
    const int dn = c.dims[std::min<std::size_t>(s + 1, c.dims.size() - 1)];
    total += 2 * conv(d, d, k, 1);          // up proj/back
    total += 2 * conv(d, d, k, c.groups);   // down proj/back (grouped)
    if (c.enable_selection) total += 4 * conv(d, d, 1, 1);
    if (c.enable_dca) {
      total += c.dca_slots * conv(dn, d, 1, 1);
      const int hidden = std::max(d / 4, 4);
      total += static_cast<std::int64_t>(hidden) * d + hidden;
      total += static_cast<std::int64_t>(c.dca_slots) * hidden + c.dca_slots;
    } else {
      total += conv(dn, d, 1, 1);
    }
  }
  total += conv(2 * c.m_v, c.dims.back(), k, 1);
  total += conv(c.feature_dim, c.dims.back(), k, 1);
  return total;
}

}  // namespace

TEST_CASE("generator forward: output shape contract") {
  sm::GeneratorConfig cfg;
  cfg.m_r = 2;
  cfg.m_v = 4;
  cfg.feature_dim = 8;
  sm::Generator gen(cfg, 1);
  auto est = gen.forward(random_tensor({4, 9, 11}, 2));
  CHECK(est.v_hat_spec.shape() == std::vector<std::int64_t>{8, 9, 11});
  CHECK(est.f_vhat.shape() == std::vector<std::int64_t>{8, 9, 11});
  CHECK_FALSE(est.v_hat_spec.has_nonfinite());
}

TEST_CASE("generator: zero-initialized heads produce zero outputs") {
  sm::GeneratorConfig cfg;
  sm::Generator gen(cfg, 3);
  zero_param(gen.params(), "head.signal.w");
  zero_param(gen.params(), "head.signal.b");
  zero_param(gen.params(), "head.feature.w");
  zero_param(gen.params(), "head.feature.b");
  auto est = gen.forward(random_tensor({4, 7, 9}, 4));
  for (double v : est.v_hat_spec.data()) CHECK(v == 0.0);
  for (double v : est.f_vhat.data()) CHECK(v == 0.0);
}

TEST_CASE("generator parameter count matches the counting oracle") {
  sm::GeneratorConfig cfg;
  cfg.n_blocks = 2;
  cfg.dims = {16, 12};
  cfg.m_r = 2;
  cfg.m_v = 1;
  cfg.feature_dim = 8;
  cfg.groups = 4;
  sm::Generator gen(cfg, 5);
  CHECK(gen.params().total_count() == expected_param_count(cfg));

  // ablations strictly reduce the count
  auto no_sel = cfg;
  no_sel.enable_selection = false;
  CHECK(sm::Generator(no_sel, 5).params().total_count() <
        gen.params().total_count());
  auto no_dca = cfg;
  no_dca.enable_dca = false;
  CHECK(sm::Generator(no_dca, 5).params().total_count() <
        gen.params().total_count());
  CHECK(sm::Generator(no_dca, 5).params().total_count() ==
        expected_param_count(no_dca));
}

TEST_CASE("selection gate: zero gate kills features, asymptote passes them") {
  auto features = random_tensor({3, 5, 6}, 6);
  auto w0 = Tensor::zeros({3, 3, 1, 1});
  auto b0 = Tensor::zeros({3});
  auto gated = sm::selection_gate(features, w0, b0);
  for (double v : gated.data()) CHECK(v == 0.0);  // mish(0) = 0
  CHECK(gated.shape() == features.shape());

  // large positive pre-activation: gate -> mish(20) ~ 20
  auto b20 = Tensor::full({3}, 20.0);
  auto big = sm::selection_gate(features, w0, b20);
  const double mish20 = 20.0 * std::tanh(std::log1p(std::exp(20.0)));
  for (std::size_t i = 0; i < big.data().size(); ++i) {
    CHECK(big.data()[i] ==
          doctest::Approx(features.data()[i] * mish20).epsilon(1e-9));
  }
}

TEST_CASE("dca: uniform attention averages kernels; K=1 is a static conv") {
  const int d = 6, dn = 4, k_slots = 3;
  auto x = random_tensor({d, 4, 5}, 7);
  std::vector<Tensor> kernels, biases;
  for (int s = 0; s < k_slots; ++s) {
    kernels.push_back(random_tensor({dn, d, 1, 1}, 100 + s));
    biases.push_back(random_tensor({dn}, 200 + s));
  }
  // zero attention MLP -> equal logits -> uniform softmax
  auto w1 = Tensor::zeros({4, d});
  auto b1 = Tensor::zeros({4});
  auto w2 = Tensor::zeros({k_slots, 4});
  auto b2 = Tensor::zeros({k_slots});
  Tensor attention;
  auto out = sm::dca_forward(x, kernels, biases, w1, b1, w2, b2, &attention);

  double att_sum = 0.0;
  for (double a : attention.data()) {
    CHECK(a == doctest::Approx(1.0 / k_slots).epsilon(1e-12));
    att_sum += a;
  }
  CHECK(att_sum == doctest::Approx(1.0).epsilon(1e-12));

  // mean kernel applied directly
  Tensor mean_k = nn::scale(nn::add(nn::add(kernels[0], kernels[1]), kernels[2]),
                            1.0 / 3.0);
  Tensor mean_b = nn::scale(nn::add(nn::add(biases[0], biases[1]), biases[2]),
                            1.0 / 3.0);
  auto want = nn::conv2d(x, mean_k, mean_b, 1, 0, 1);
  for (std::size_t i = 0; i < want.data().size(); ++i) {
    CHECK(out.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-12));
  }

  // K = 1 degenerates to the single kernel
  auto single = sm::dca_forward(x, {kernels[0]}, {biases[0]}, w1, b1,
                                Tensor::zeros({1, 4}), Tensor::zeros({1}),
                                nullptr);
  auto direct = nn::conv2d(x, kernels[0], biases[0], 1, 0, 1);
  for (std::size_t i = 0; i < direct.data().size(); ++i) {
    CHECK(single.data()[i] == doctest::Approx(direct.data()[i]).epsilon(1e-13));
  }
}

TEST_CASE("dca attention sums to 1 for random inputs") {
  const int d = 8;
  sm::GeneratorConfig cfg;
  cfg.n_blocks = 1;
  cfg.dims = {d};
  cfg.groups = 2;
  sm::Generator gen(cfg, 11);
  // random attention params via the generator's own store
  std::vector<Tensor> kernels, biases;
  for (int s = 0; s < cfg.dca_slots; ++s) {
    const std::string base = "stage0.dca.slot" + std::to_string(s);
    kernels.push_back(gen.params().at(base + ".w"));
    biases.push_back(gen.params().at(base + ".b"));
  }
  for (int trial = 0; trial < 5; ++trial) {
    Tensor attention;
    sm::dca_forward(random_tensor({d, 6, 7}, 300 + trial), kernels, biases,
                    gen.params().at("stage0.dca.att1.w"),
                    gen.params().at("stage0.dca.att1.b"),
                    gen.params().at("stage0.dca.att2.w"),
                    gen.params().at("stage0.dca.att2.b"), &attention);
    double sum = 0.0;
    for (double a : attention.data()) sum += a;
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("selection disabled: stage equals a hand-composed DBPN unit") {
  sm::GeneratorConfig cfg;
  cfg.n_blocks = 1;
  cfg.dims = {8};
  cfg.groups = 2;
  cfg.enable_selection = false;
  cfg.enable_dca = false;
  cfg.m_r = 2;
  cfg.m_v = 1;
  cfg.feature_dim = 3;
  sm::Generator gen(cfg, 13);
  auto x = random_tensor({4, 6, 7}, 14);
  auto est = gen.forward(x);

  // hand-compose the same graph from the stored parameters
  const auto& p = gen.params();
  auto conv3 = [&](const Tensor& in, const std::string& name, int groups) {
    return nn::conv2d(in, p.at(name + ".w"), p.at(name + ".b"), 1, 1, groups);
  };
  Tensor h = nn::mish(conv3(x, "init", 1));
  Tensor up_p = nn::mish(conv3(h, "stage0.up.proj", 1));
  Tensor up_c = nn::mish(conv3(up_p, "stage0.up.back", 1));
  h = nn::add(up_c, h);
  Tensor dn_p = nn::mish(conv3(h, "stage0.down.proj", 2));
  Tensor dn_c = nn::mish(conv3(dn_p, "stage0.down.back", 2));
  h = nn::sub(dn_c, h);
  h = nn::conv2d(h, p.at("stage0.reduce.w"), p.at("stage0.reduce.b"), 1, 0, 1);
  Tensor v_hat = conv3(h, "head.signal", 1);

  REQUIRE(v_hat.shape() == est.v_hat_spec.shape());
  for (std::size_t i = 0; i < v_hat.data().size(); ++i) {
    CHECK(est.v_hat_spec.data()[i] == v_hat.data()[i]);
  }
}

TEST_CASE("gradient check through one full (up, down, DCA) stage") {
  sm::GeneratorConfig cfg;
  cfg.n_blocks = 1;
  cfg.dims = {8};
  cfg.groups = 2;
  cfg.m_r = 1;
  cfg.m_v = 1;
  cfg.feature_dim = 2;
  sm::Generator gen(cfg, 17);
  auto x = random_tensor({2, 5, 6}, 18);
  const double err = nn::grad_check(
      [&](const Tensor& t) { return gen.forward(t).v_hat_spec; }, x, 1e-5);
  CHECK(err < 1e-5);
}

TEST_CASE("discriminator: deterministic, finite under large inputs") {
  sm::DiscriminatorConfig dcfg;
  dcfg.in_channels = 2;
  sm::Discriminator disc(dcfg, 19);
  auto ref = random_tensor({1, 16, 20}, 20);
  auto est = random_tensor({1, 16, 20}, 21);
  auto s1 = disc.forward(ref, est);
  auto s2 = disc.forward(ref, est);
  CHECK(s1.item() == s2.item());

  auto big = est;
  auto big_data = big.mutable_data();
  for (auto& v : big.mutable_data()) v *= 1e3;
  auto s3 = disc.forward(ref, big);
  CHECK(std::isfinite(s3.item()));
}

TEST_CASE("discriminator learns to separate real from fake in 200 steps") {
  sm::DiscriminatorConfig dcfg;
  dcfg.in_channels = 2;
  dcfg.base_channels = 4;
  sm::Discriminator disc(dcfg, 23);
  auto real = random_tensor({1, 12, 16}, 24);
  auto fake = random_tensor({1, 12, 16}, 25);

  auto separation = [&] {
    return disc.forward(real, real).item() - disc.forward(real, fake).item();
  };
  const double before = separation();
  nn::AdamState opt;
  opt.cfg.lr = 1e-3;
  for (int step = 0; step < 200; ++step) {
    disc.params().zero_grads();
    auto loss = sm::lsgan_discriminator_term(disc.forward(real, real),
                                             disc.forward(real, fake));
    nn::backward(loss);
    nn::adam_step(disc.params(), opt);
  }
  CHECK(separation() > before);
  CHECK(separation() > 0.5);  // clearly separated after overfitting
}

TEST_CASE("composite loss: clip at perfection and the w/o-GAN shape") {
  std::vector<double> ref = {0.4, -0.2, 0.1, 0.9};
  auto est = Tensor::from_data({1, 4}, ref, true);
  sm::LossConfig cfg;
  cfg.w_adv_g = 0.0;
  cfg.w_adv_d = 0.0;  // the "w/o GAN" switch
  auto parts = sm::composite_loss(est, {ref}, est, ref, Tensor(), Tensor(),
                                  Tensor(), cfg);
  // both SNR terms clip at -30: total = 0.3*(-30) + 0.7*(-30) = -30
  CHECK(parts.gen_loss.item() == doctest::Approx(-30.0).epsilon(1e-12));
  CHECK(parts.vme_loss == -30.0);
  CHECK(parts.bf_loss == -30.0);
  CHECK_FALSE(parts.disc_loss.defined());

  // dropping the VME term ("w/o VM loss") changes the total accordingly
  auto no_vme = cfg;
  no_vme.w_vme = 0.0;
  auto parts2 = sm::composite_loss(Tensor(), {}, est, ref, Tensor(), Tensor(),
                                   Tensor(), no_vme);
  CHECK(parts2.gen_loss.item() == doctest::Approx(-21.0).epsilon(1e-12));
}

TEST_CASE("train_step: deterministic and loss-frozen at lr 0") {
  auto ranges = testfix::desk_ranges(0.4, 2);
  auto sc = testfix::make_scene(808, 0, scene::Task::omni, ranges,
                                testfix::desk_array());

  sm::TrainConfig tcfg;
  tcfg.loss.w_adv_g = 0.01;
  tcfg.loss.w_adv_d = 0.01;
  sm::GeneratorConfig gcfg;
  gcfg.dims = {8, 8};
  gcfg.groups = 2;
  gcfg.m_r = 2;
  gcfg.m_v = 4;

  auto run = [&](double lr, int steps) {
    sm::Generator gen(gcfg, 31);
    sm::DiscriminatorConfig dcfg;
    dcfg.in_channels = 2 * gcfg.m_v;
    dcfg.base_channels = 4;
    sm::Discriminator disc(dcfg, 32);
    sm::TrainState state;
    state.gen_opt.cfg.lr = lr;
    state.disc_opt.cfg.lr = lr;
    std::vector<sm::TrainScene> batch = {sm::prepare_train_scene(sc, tcfg)};
    std::vector<double> losses;
    for (int s = 0; s < steps; ++s) {
      losses.push_back(train_step(batch, gen, disc, state, tcfg).gen_loss);
    }
    return std::make_pair(losses, gen.params().at("init.w").data());
  };

  auto [la, pa] = run(1e-3, 3);
  auto [lb, pb] = run(1e-3, 3);
  CHECK(la == lb);  // bit-identical trajectories
  CHECK(pa == pb);

  auto [lf, pf] = run(0.0, 3);
  CHECK(lf[0] == lf[1]);
  CHECK(lf[1] == lf[2]);  // frozen generator -> constant losses
}

TEST_CASE("training state round-trips through the checkpoint container") {
  auto ranges = testfix::desk_ranges(0.4, 2);
  auto sc = testfix::make_scene(809, 0, scene::Task::omni, ranges,
                                testfix::desk_array());
  sm::TrainConfig tcfg;
  sm::GeneratorConfig gcfg;
  gcfg.dims = {8, 8};
  gcfg.groups = 2;
  gcfg.m_r = 2;
  gcfg.m_v = 4;
  sm::Generator gen(gcfg, 41);
  sm::DiscriminatorConfig dcfg;
  dcfg.in_channels = 2 * gcfg.m_v;
  dcfg.base_channels = 4;
  sm::Discriminator disc(dcfg, 42);
  sm::TrainState state;
  std::vector<sm::TrainScene> batch = {sm::prepare_train_scene(sc, tcfg)};
  for (int s = 0; s < 2; ++s) train_step(batch, gen, disc, state, tcfg);

  auto packed = sm::pack_training_state(gen, disc, state);

  sm::Generator gen2(gcfg, 999);  // different init, then overwritten
  sm::Discriminator disc2(dcfg, 998);
  sm::TrainState state2;
  sm::unpack_training_state(packed, gen2, disc2, state2);
  CHECK(state2.step == state.step);

  // one more step on each must agree bit-exactly
  auto r1 = train_step(batch, gen, disc, state, tcfg);
  auto r2 = train_step(batch, gen2, disc2, state2, tcfg);
  CHECK(r1.gen_loss == r2.gen_loss);
  CHECK(gen.params().at("init.w").data() == gen2.params().at("init.w").data());
}
