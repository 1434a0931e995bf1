#pragma once

// Utterance-level dialogue-act classifier: two convolution pipelines (word
// embeddings, POS-tag embeddings), each made of parallel branches with kernel
// sizes 1, 2, 3 (conv -> max-pool -> batch norm -> ReLU), concatenated with
// the lexical, SSI and context blocks, then FC -> ReLU -> dropout -> output
// layer -> softmax.

#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cdac/model/config.hpp"
#include "cdac/model/featurizer.hpp"
#include "cdac/nn/ops.hpp"
#include "cdac/nn/tensor.hpp"

namespace cdac::model {

using nn::Mode;

template <typename T>
class DacNetwork {
 public:
  static constexpr std::size_t kPipelines = 2;  // 0: words, 1: POS tags

  struct BranchIndex {
    std::size_t weight, bias, gamma, beta, running_mean, running_var;
  };

  struct BranchCache {
    std::vector<T> pooled;  // batch x filters, before batch norm
    std::vector<int> argmax;
    std::vector<T> out;     // batch x filters, after ReLU
    nn::BatchNormCache<T> bn;
    std::vector<T> running_mean, running_var;  // updated copies (train mode)
  };

  struct PipelineCache {
    bool active = false;
    std::vector<std::vector<T>> gathered;  // per example: rows x width
    std::vector<BranchCache> branches;
  };

  struct Forward {
    std::size_t batch = 0;
    Mode mode = Mode::eval;
    std::vector<const DacInput*> inputs;
    PipelineCache pipes[kPipelines];
    std::vector<T> h0;     // batch x fc_input_dim
    std::vector<T> a1;     // batch x hidden, after ReLU
    std::vector<T> mask;   // dropout mask
    std::vector<T> d1;     // after dropout
    std::vector<T> probs;  // batch x classes
  };

  DacNetwork() = default;

  DacNetwork(const ModelConfig& cfg, std::size_t vocab_size, std::size_t pos_vocab_size,
             std::uint64_t seed)
      : cfg_(cfg) {
    cfg_.validate();
    std::mt19937_64 rng(seed);
    auto uniform = [&](nn::Tensor<T>& t, double limit) {
      std::uniform_real_distribution<double> d(-limit, limit);
      for (auto& v : t.values) v = static_cast<T>(d(rng));
    };
    nn::Tensor<T> wemb("word.embedding", {vocab_size, cfg_.word_embedding_dim});
    uniform(wemb, 0.05);
    std::fill(wemb.row(0), wemb.row(0) + wemb.cols(), T(0));
    params.add(std::move(wemb));
    nn::Tensor<T> pemb("pos.embedding", {pos_vocab_size, cfg_.pos_embedding_dim});
    uniform(pemb, 0.05);
    std::fill(pemb.row(0), pemb.row(0) + pemb.cols(), T(0));
    params.add(std::move(pemb));
    for (const char* pipe : {"word", "pos"}) {
      const std::size_t width =
          std::string(pipe) == "word" ? cfg_.word_embedding_dim : cfg_.pos_embedding_dim;
      for (auto k : cfg_.kernel_sizes) {
        const std::string p = std::string(pipe) + ".conv" + std::to_string(k) + ".";
        const std::string b = std::string(pipe) + ".bn" + std::to_string(k) + ".";
        nn::Tensor<T> w(p + "weight", {cfg_.filters, k * width});
        uniform(w, std::sqrt(6.0 / static_cast<double>(k * width + cfg_.filters)));
        params.add(std::move(w));
        params.add(nn::Tensor<T>(p + "bias", {cfg_.filters}));
        params.add(nn::Tensor<T>(b + "gamma", {cfg_.filters}, T(1)));
        params.add(nn::Tensor<T>(b + "beta", {cfg_.filters}));
        params.add(nn::Tensor<T>(b + "running_mean", {cfg_.filters}), false);
        params.add(nn::Tensor<T>(b + "running_var", {cfg_.filters}, T(1)), false);
      }
      params.add(nn::Tensor<T>(std::string(pipe) + ".bn_updates", {1}), false);
    }
    nn::Tensor<T> fw("fc.weight", {cfg_.hidden_size, cfg_.fc_input_dim()});
    uniform(fw, std::sqrt(6.0 / static_cast<double>(cfg_.fc_input_dim() + cfg_.hidden_size)));
    params.add(std::move(fw));
    params.add(nn::Tensor<T>("fc.bias", {cfg_.hidden_size}));
    nn::Tensor<T> ow("output.weight", {cfg_.num_classes, cfg_.hidden_size});
    uniform(ow, std::sqrt(6.0 / static_cast<double>(cfg_.hidden_size + cfg_.num_classes)));
    params.add(std::move(ow));
    params.add(nn::Tensor<T>("output.bias", {cfg_.num_classes}));
    resolve_indices();
  }

  // Rebuilds from stored parameters (checkpoint load); validates shapes.
  static DacNetwork from_parameters(const ModelConfig& cfg, nn::ParameterSet<T> p) {
    DacNetwork net;
    net.cfg_ = cfg;
    net.cfg_.validate();
    net.params = std::move(p);
    net.resolve_indices();
    net.check_shapes();
    return net;
  }

  const ModelConfig& config() const { return cfg_; }
  ModelConfig& mutable_config() { return cfg_; }
  std::size_t vocab_size() const { return params[word_emb_].rows(); }

  nn::Tensor<T>& word_embedding() { return params[word_emb_]; }
  const nn::Tensor<T>& word_embedding() const { return params[word_emb_]; }

  template <typename U>
  DacNetwork<U> cast() const {
    return DacNetwork<U>::from_parameters(cfg_, params.template cast<U>());
  }

  // `context` is batch x context_dim. Eval mode leaves the network untouched;
  // train mode records updated batch-norm statistics in the returned state
  // (see commit_running_stats) and draws dropout masks from `rng`.
  Forward forward(std::span<const DacInput* const> inputs, std::span<const T> context,
                  Mode mode, std::mt19937_64* rng = nullptr) const {
    const std::size_t B = inputs.size();
    const std::size_t in_dim = cfg_.fc_input_dim();
    nn::check_shape(B > 0, "empty batch");
    nn::check_shape(context.size() == B * cfg_.context_dim(),
                    "context block has " + std::to_string(context.size()) +
                        " values, expected " + std::to_string(B * cfg_.context_dim()));
    if (mode == Mode::train && !rng) throw NumericError("train mode needs an rng");
    Forward fw;
    fw.batch = B;
    fw.mode = mode;
    fw.inputs.assign(inputs.begin(), inputs.end());
    fw.h0.assign(B * in_dim, T(0));

    const std::size_t pw = cfg_.pipeline_width();
    for (std::size_t p = 0; p < kPipelines; ++p) {
      auto& pc = fw.pipes[p];
      pc.active = p == 0 || cfg_.use_syntactic;
      if (!pc.active) continue;
      run_pipeline(p, fw, pc, mode);
      for (std::size_t j = 0; j < cfg_.kernel_sizes.size(); ++j)
        for (std::size_t b = 0; b < B; ++b)
          std::copy_n(pc.branches[j].out.data() + b * cfg_.filters, cfg_.filters,
                      fw.h0.data() + b * in_dim + p * pw + j * cfg_.filters);
    }
    const std::size_t lex_off = 2 * pw;
    const std::size_t ssi_off = lex_off + cfg_.lexical_dim;
    const std::size_t ctx_off = ssi_off + cfg_.ssi_dim();
    for (std::size_t b = 0; b < B; ++b) {
      const DacInput& x = *inputs[b];
      nn::check_shape(x.token_ids.size() == cfg_.max_len && x.pos_ids.size() == cfg_.max_len,
                      "token/POS id sequences must have length max_len");
      T* row = fw.h0.data() + b * in_dim;
      if (cfg_.use_lexical)
        for (std::size_t d = 0; d < cfg_.lexical_dim; ++d)
          row[lex_off + d] = static_cast<T>(x.lexical[d]);
      x.ssi.write_dense(std::span<T>(row + ssi_off, cfg_.ssi_dim()), cfg_.topic_vocab_size,
                        cfg_.word_embedding_dim);
      std::copy_n(context.data() + b * cfg_.context_dim(), cfg_.context_dim(),
                  row + ctx_off);
    }

    const std::size_t H = cfg_.hidden_size, C = cfg_.num_classes;
    fw.a1.assign(B * H, T(0));
    nn::fully_connected_forward<T>(fw.h0, B, in_dim, params[fc_w_].values,
                                   params[fc_b_].values, H, fw.a1);
    nn::relu<T>(fw.a1);
    fw.d1 = fw.a1;
    std::mt19937_64 dummy;
    nn::dropout<T>(std::span<T>(fw.d1), cfg_.dropout, mode, rng ? *rng : dummy, fw.mask);
    fw.probs.assign(B * C, T(0));
    nn::fully_connected_forward<T>(fw.d1, B, H, params[out_w_].values,
                                   params[out_b_].values, C, fw.probs);
    for (std::size_t b = 0; b < B; ++b)
      nn::softmax(std::span<T>(fw.probs.data() + b * C, C));
    return fw;
  }

  void commit_running_stats(const Forward& fw) {
    if (fw.mode != Mode::train) return;
    for (std::size_t p = 0; p < kPipelines; ++p) {
      if (!fw.pipes[p].active) continue;
      for (std::size_t j = 0; j < cfg_.kernel_sizes.size(); ++j) {
        const auto& idx = branches_[p][j];
        params[idx.running_mean].values = fw.pipes[p].branches[j].running_mean;
        params[idx.running_var].values = fw.pipes[p].branches[j].running_var;
      }
      params[bn_updates_[p]].values[0] += T(1);
    }
  }

  // Mean cross-entropy over the batch.
  T loss(const Forward& fw, std::span<const std::size_t> gold) const {
    nn::check_shape(gold.size() == fw.batch, "gold labels");
    const std::size_t C = cfg_.num_classes;
    T total = 0;
    for (std::size_t b = 0; b < fw.batch; ++b)
      total += nn::cross_entropy(std::span<const T>(fw.probs.data() + b * C, C), gold[b]);
    return total / static_cast<T>(fw.batch);
  }

  // Gradients of the mean cross-entropy, accumulated into `grads` (which
  // must come from params.zeros_like()). Returns the loss.
  T backward(const Forward& fw, std::span<const std::size_t> gold,
             nn::ParameterSet<T>& grads) const {
    const T batch_loss = loss(fw, gold);
    const std::size_t B = fw.batch, C = cfg_.num_classes, H = cfg_.hidden_size;
    const std::size_t in_dim = cfg_.fc_input_dim();
    std::vector<T> dz2(fw.probs);
    for (std::size_t b = 0; b < B; ++b) dz2[b * C + gold[b]] -= T(1);
    for (auto& v : dz2) v /= static_cast<T>(B);

    std::vector<T> dd1(B * H);
    nn::fully_connected_backward<T>(dz2, fw.d1, B, H, params[out_w_].values, C,
                                    grads[out_w_].values, grads[out_b_].values, dd1);
    for (std::size_t i = 0; i < dd1.size(); ++i) dd1[i] *= fw.mask[i];
    nn::relu_backward<T>(fw.a1, dd1);
    std::vector<T> dh0(B * in_dim);
    nn::fully_connected_backward<T>(dd1, fw.h0, B, in_dim, params[fc_w_].values, H,
                                    grads[fc_w_].values, grads[fc_b_].values, dh0);

    const std::size_t pw = cfg_.pipeline_width(), F = cfg_.filters;
    for (std::size_t p = 0; p < kPipelines; ++p) {
      const auto& pc = fw.pipes[p];
      if (!pc.active) continue;
      const std::size_t width = pipe_width(p);
      const std::size_t emb = p == 0 ? word_emb_ : pos_emb_;
      std::vector<std::vector<T>> dgathered(B);
      for (std::size_t b = 0; b < B; ++b) dgathered[b].assign(pc.gathered[b].size(), T(0));
      for (std::size_t j = 0; j < cfg_.kernel_sizes.size(); ++j) {
        const auto& bc = pc.branches[j];
        const auto& idx = branches_[p][j];
        std::vector<T> dout(B * F);
        for (std::size_t b = 0; b < B; ++b)
          std::copy_n(dh0.data() + b * in_dim + p * pw + j * F, F, dout.data() + b * F);
        nn::relu_backward<T>(bc.out, dout);
        std::vector<T> dpooled(B * F);
        nn::batch_norm_backward<T>(dout, B, F, params[idx.gamma].values, bc.bn,
                                   grads[idx.gamma].values, grads[idx.beta].values,
                                   dpooled);
        const nn::ConvBranchSpec spec{cfg_.kernel_sizes[j], F, width};
        for (std::size_t b = 0; b < B; ++b) {
          if (fw.inputs[b]->length == 0) continue;
          nn::conv_pool_backward(pc.gathered[b].data(), spec, params[idx.weight].values.data(),
                                 dpooled.data() + b * F, bc.argmax.data() + b * F,
                                 grads[idx.weight].values.data(),
                                 grads[idx.bias].values.data(), dgathered[b].data());
        }
      }
      for (std::size_t b = 0; b < B; ++b) {
        const auto& ids = p == 0 ? fw.inputs[b]->token_ids : fw.inputs[b]->pos_ids;
        for (std::size_t r = 0; r < fw.inputs[b]->length; ++r)
          nn::kernels::axpy(T(1), dgathered[b].data() + r * width,
                            grads[emb].row(static_cast<std::size_t>(ids[r])), width);
      }
    }
    return batch_loss;
  }

  // Single-turn class distribution in eval mode.
  std::vector<T> predict(const DacInput& input, std::span<const T> context) const {
    const DacInput* ptr = &input;
    auto fw = forward(std::span<const DacInput* const>(&ptr, 1), context, Mode::eval);
    return std::move(fw.probs);
  }

  nn::ParameterSet<T> params;

 private:
  std::size_t pipe_width(std::size_t p) const {
    return p == 0 ? cfg_.word_embedding_dim : cfg_.pos_embedding_dim;
  }

  void run_pipeline(std::size_t p, Forward& fw, PipelineCache& pc, Mode mode) const {
    const std::size_t B = fw.batch, F = cfg_.filters, width = pipe_width(p);
    const auto& table = params[p == 0 ? word_emb_ : pos_emb_];
    const std::size_t kmax = cfg_.max_kernel();
    pc.gathered.resize(B);
    for (std::size_t b = 0; b < B; ++b) {
      const DacInput& x = *fw.inputs[b];
      const auto& ids = p == 0 ? x.token_ids : x.pos_ids;
      const std::size_t rows = std::max(x.length, kmax);
      auto& buf = pc.gathered[b];
      buf.assign(rows * width, T(0));
      for (std::size_t r = 0; r < x.length; ++r) {
        const auto id = static_cast<std::size_t>(ids[r]);
        nn::check_shape(id < table.rows(), "token id out of vocabulary range");
        std::copy_n(table.row(id), width, buf.data() + r * width);
      }
    }
    pc.branches.resize(cfg_.kernel_sizes.size());
    for (std::size_t j = 0; j < cfg_.kernel_sizes.size(); ++j) {
      auto& bc = pc.branches[j];
      const auto& idx = branches_[p][j];
      const nn::ConvBranchSpec spec{cfg_.kernel_sizes[j], F, width};
      bc.pooled.assign(B * F, T(0));
      bc.argmax.assign(B * F, -1);
      for (std::size_t b = 0; b < B; ++b)
        nn::conv_pool_forward(pc.gathered[b].data(), fw.inputs[b]->length, spec,
                              params[idx.weight].values.data(),
                              params[idx.bias].values.data(), bc.pooled.data() + b * F,
                              bc.argmax.data() + b * F);
      bc.running_mean = params[idx.running_mean].values;
      bc.running_var = params[idx.running_var].values;
      if (mode == Mode::eval) debias(p, bc.running_mean, bc.running_var);
      bc.out.assign(B * F, T(0));
      nn::BatchNormSpec bn{cfg_.bn_momentum, cfg_.bn_epsilon};
      nn::batch_norm_forward<T>(bc.pooled, B, F, params[idx.gamma].values,
                                params[idx.beta].values, bc.running_mean, bc.running_var,
                                bn, mode, bc.out, &bc.bn);
      nn::relu<T>(bc.out);
      // An empty utterance contributes a zero vector.
      for (std::size_t b = 0; b < B; ++b)
        if (fw.inputs[b]->length == 0)
          std::fill_n(bc.out.data() + b * F, F, T(0));
    }
  }

  // The running averages start at mean 0 and variance 1, and with M close to 1
  // they stay near those values for hundreds of updates. Evaluation removes the
  // initial values' remaining share M^t, as Adam does for its moments.
  void debias(std::size_t p, std::vector<T>& mean, std::vector<T>& var) const {
    const double t = static_cast<double>(params[bn_updates_[p]].values[0]);
    if (t <= 0) return;
    const double decay = std::pow(cfg_.bn_momentum, t);
    const double keep = 1.0 - decay;
    for (auto& m : mean) m = static_cast<T>(static_cast<double>(m) / keep);
    for (auto& v : var) v = static_cast<T>((static_cast<double>(v) - decay) / keep);
  }

  void resolve_indices() {
    word_emb_ = params.index_of("word.embedding");
    pos_emb_ = params.index_of("pos.embedding");
    const char* pipes[] = {"word", "pos"};
    for (std::size_t p = 0; p < kPipelines; ++p) {
      branches_[p].clear();
      for (auto k : cfg_.kernel_sizes) {
        const std::string c = std::string(pipes[p]) + ".conv" + std::to_string(k) + ".";
        const std::string n = std::string(pipes[p]) + ".bn" + std::to_string(k) + ".";
        branches_[p].push_back({params.index_of(c + "weight"), params.index_of(c + "bias"),
                                params.index_of(n + "gamma"), params.index_of(n + "beta"),
                                params.index_of(n + "running_mean"),
                                params.index_of(n + "running_var")});
      }
      bn_updates_[p] = params.index_of(std::string(pipes[p]) + ".bn_updates");
    }
    fc_w_ = params.index_of("fc.weight");
    fc_b_ = params.index_of("fc.bias");
    out_w_ = params.index_of("output.weight");
    out_b_ = params.index_of("output.bias");
  }

  void check_shapes() const {
    auto expect = [&](std::size_t i, std::vector<std::size_t> shape) {
      if (params[i].shape != shape)
        throw DataError("parameter '" + params[i].name + "' has a shape inconsistent "
                        "with the model configuration");
    };
    if (params[word_emb_].shape.size() != 2 ||
        params[word_emb_].shape[1] != cfg_.word_embedding_dim)
      throw DataError("word.embedding width does not match the configuration");
    if (params[pos_emb_].shape.size() != 2 ||
        params[pos_emb_].shape[1] != cfg_.pos_embedding_dim)
      throw DataError("pos.embedding width does not match the configuration");
    for (std::size_t p = 0; p < kPipelines; ++p)
      for (std::size_t j = 0; j < cfg_.kernel_sizes.size(); ++j) {
        const auto& idx = branches_[p][j];
        expect(idx.weight, {cfg_.filters, cfg_.kernel_sizes[j] * pipe_width(p)});
        for (auto i : {idx.bias, idx.gamma, idx.beta, idx.running_mean, idx.running_var})
          expect(i, {cfg_.filters});
      }
    expect(fc_w_, {cfg_.hidden_size, cfg_.fc_input_dim()});
    expect(fc_b_, {cfg_.hidden_size});
    expect(out_w_, {cfg_.num_classes, cfg_.hidden_size});
    expect(out_b_, {cfg_.num_classes});
    for (auto i : bn_updates_) expect(i, {1});
  }

  ModelConfig cfg_;
  std::size_t bn_updates_[kPipelines] = {0, 0};
  std::size_t word_emb_ = 0, pos_emb_ = 0, fc_w_ = 0, fc_b_ = 0, out_w_ = 0, out_b_ = 0;
  std::vector<BranchIndex> branches_[kPipelines];
};

}  // namespace cdac::model
