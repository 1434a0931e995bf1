#pragma once

// Central finite-difference checks of the utterance-level network at toy
// size, in double precision.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cdac/features/pos.hpp"
#include "cdac/model/network.hpp"

namespace cdac::check {

struct GradCheckResult {
  double max_rel_error = 0;
  std::string worst;
  std::size_t checked = 0;
};

inline double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1e-6, std::abs(analytic) + std::abs(numeric));
}

// Compares d f / d x[i] against central differences for every i.
inline GradCheckResult check_vector(const std::function<double()>& f, std::vector<double>& x,
                                    const std::vector<double>& analytic, const std::string& name,
                                    double h = 1e-6) {
  GradCheckResult r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f();
    x[i] = saved - h;
    const double down = f();
    x[i] = saved;
    const double numeric = (up - down) / (2 * h);
    const double e = rel_error(analytic[i], numeric);
    ++r.checked;
    if (e > r.max_rel_error) {
      r.max_rel_error = e;
      r.worst = name + "[" + std::to_string(i) + "]";
    }
  }
  return r;
}

inline void merge(GradCheckResult& into, const GradCheckResult& r) {
  into.checked += r.checked;
  if (r.max_rel_error > into.max_rel_error) {
    into.max_rel_error = r.max_rel_error;
    into.worst = r.worst;
  }
}

// vocab 10, word dim 4, 2 filters per branch, 3 classes.
inline model::ModelConfig toy_config() {
  model::ModelConfig c;
  c.num_classes = 3;
  c.context_window = 2;
  c.hidden_size = 5;
  c.dropout = 0.5;
  c.word_embedding_dim = 4;
  c.pos_embedding_dim = 3;
  c.max_len = 6;
  c.topic_vocab_size = 2;
  c.filters = 2;
  return c;
}

inline std::vector<model::DacInput> toy_inputs(const model::ModelConfig& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> word(2, 9), tag(2, 20);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t lengths[] = {3, 1, 0, 6, 2};
  std::vector<model::DacInput> out;
  for (std::size_t i = 0; i < std::size(lengths); ++i) {
    model::DacInput in;
    in.length = lengths[i];
    in.token_ids.assign(c.max_len, 0);
    in.pos_ids.assign(c.max_len, 0);
    for (std::size_t t = 0; t < in.length; ++t) {
      in.token_ids[t] = word(rng);
      in.pos_ids[t] = tag(rng);
    }
    for (auto& v : in.lexical) v = gauss(rng);
    in.ssi.topic = static_cast<int>(i % 2);
    in.ssi.suggested = i % 3 == 0 ? -1 : 1;
    if (i % 2 == 0)
      for (std::size_t d = 0; d < c.word_embedding_dim; ++d)
        in.ssi.item.push_back(static_cast<float>(gauss(rng)));
    in.ssi.speaker_slot = static_cast<int>(i % 2);
    out.push_back(std::move(in));
  }
  return out;
}

// Full composed model: every trainable parameter checked. In eval mode the
// batch-norm running statistics are randomized first so the eval path is
// non-trivial; in train mode the dropout mask is held fixed by reseeding.
inline GradCheckResult check_network(nn::Mode mode, std::uint64_t seed = 3) {
  const auto cfg = toy_config();
  model::DacNetwork<double> net(cfg, 10, features::PosVocabulary().size(), seed);
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (std::size_t i = 0; i < net.params.size(); ++i) {
    auto& t = net.params[i];
    if (t.name.ends_with("running_var"))
      for (auto& v : t.values) v = 0.5 + (u(rng) + 0.5);
    else if (t.name.ends_with("running_mean"))
      for (auto& v : t.values) v = u(rng);
    else if (t.name.ends_with("bn_updates"))
      t.values[0] = 2000;  // exercises the debiased eval statistics
    else if (t.name.ends_with(".bias") || t.name.ends_with(".beta") ||
             t.name.ends_with(".gamma"))
      for (auto& v : t.values) v += 0.3 * u(rng);
  }
  const auto inputs = toy_inputs(cfg, seed + 2);
  std::vector<const model::DacInput*> ptrs;
  for (const auto& in : inputs) ptrs.push_back(&in);
  const std::size_t B = ptrs.size();
  std::vector<double> context(B * cfg.context_dim(), 0.0);
  for (std::size_t b = 0; b < B; ++b)
    if (b > 0) context[b * cfg.context_dim() + (b % cfg.context_dim())] = 1.0;
  const std::vector<std::size_t> gold = {0, 2, 1, 1, 0};

  auto loss = [&]() {
    std::mt19937_64 drop(seed + 4);
    auto fw = net.forward(ptrs, context, mode, &drop);
    return net.loss(fw, gold);
  };
  std::mt19937_64 drop(seed + 4);
  auto fw = net.forward(ptrs, context, mode, &drop);
  auto grads = net.params.zeros_like();
  net.backward(fw, gold, grads);

  GradCheckResult total;
  for (std::size_t i = 0; i < net.params.size(); ++i) {
    if (!net.params.trainable[i]) continue;
    merge(total, check_vector(loss, net.params[i].values, grads[i].values, net.params[i].name));
  }
  return total;
}

}  // namespace cdac::check
