// Copyright 2026 The evptrack Authors
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

#include "evptrack/grad_suite.hpp"

#include <functional>
#include <utility>

#include "evptrack/head_loss.hpp"
#include "evptrack/model.hpp"
#include "evptrack/ops.hpp"
#include "evptrack/rng.hpp"

namespace evp {

namespace {

using Td = Tensor<double>;
using Leaves = std::vector<std::pair<std::string, Td>>;

Td uniform(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0, bool leaf = true) {
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return Td(std::move(shape), std::move(v), leaf);
}

// Magnitudes in [lo, hi] with random sign, away from the kinks of abs/clamp.
Td signed_band(Shape shape, Rng& rng, double lo, double hi) {
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(lo, hi);
  return Td(std::move(shape), std::move(v), true);
}

Image random_image(std::size_t size, Rng& rng) {
  Image img(size, size);
  for (auto& v : img.data) v = static_cast<float>(rng.uniform());
  return img;
}

Leaves param_leaves(const ParameterList<double>& params) {
  Leaves out;
  for (const auto& p : params) out.emplace_back(p.path, p.tensor);
  return out;
}

ModelConfig small_model() {
  ModelConfig cfg;
  cfg.dim = 16;
  cfg.heads = 2;
  cfg.depth = 1;
  cfg.st_depth = 1;
  cfg.mlp_ratio = 2;
  cfg.template_size = 32;
  cfg.search_size = 64;
  cfg.prompts = PromptMode::kBoth;
  cfg.init_std = 0.1;
  return cfg;
}

BBox random_box(Rng& rng) {
  const double w = rng.uniform(0.15, 0.4), h = rng.uniform(0.15, 0.4);
  return {rng.uniform(0.05, 0.95 - w), rng.uniform(0.05, 0.95 - h), w, h};
}

class Suite {
 public:
  explicit Suite(const GradSuiteOptions& o) : opts_(o) {}

  std::vector<GradSuiteCase> run() {
    for (const std::uint64_t seed : opts_.seeds) {
      seed_ = seed;
      index_ = 0;
      elementwise();
      structural();
      reductions();
      losses();
      blocks();
      end_to_end();
    }
    return std::move(cases_);
  }

 private:
  // A fresh generator per (seed, case) so cases do not shift each other's inputs.
  Rng next_rng() { return Rng(seed_).fork(++index_); }

  // Checks d/d(leaves) of <g(), W> for a fixed random W. `g` must rebuild its
  // graph from the leaf handles on every call.
  void check(const std::string& name, Rng& rng, const Leaves& leaves, const std::function<Td()>& g,
             double tol = 0.0, std::size_t max_coords = 0) {
    Td w;
    {
      NoGradGuard ng;
      w = uniform(g().shape(), rng, -1.0, 1.0, false);
    }
    GradCheckOptions o;
    o.seed = seed_;
    o.max_coords = max_coords;
    const auto f = [&]() { return sum(mul(g(), w)); };
    cases_.push_back({name, seed_, tol > 0.0 ? tol : opts_.op_tolerance, grad_check_leaves<double>(f, leaves, o)});
  }

  void unary(const std::string& name, Td x, const std::function<Td(const Td&)>& op) {
    Rng rng = next_rng();
    check(name, rng, {{"x", x}}, [x, op] { return op(x); });
  }

  void elementwise() {
    {
      Rng rng = next_rng();
      Td a = uniform({3, 4}, rng), b = uniform({3, 4}, rng);
      check("add", rng, {{"a", a}, {"b", b}}, [=] { return add(a, b); });
      check("sub", rng, {{"a", a}, {"b", b}}, [=] { return sub(a, b); });
      check("mul", rng, {{"a", a}, {"b", b}}, [=] { return mul(a, b); });
    }
    {
      Rng rng = next_rng();
      Td a = uniform({3, 4}, rng), b = uniform({4}, rng);
      check("add_rowwise", rng, {{"a", a}, {"b", b}}, [=] { return add_rowwise(a, b); });
      Td c = uniform({3, 4}, rng);
      check("add_n", rng, {{"a", a}, {"c", c}}, [=] { return add_n<double>({a, c, a}); });
    }
    Rng r = next_rng();
    unary("scale", uniform({5}, r), [](const Td& x) { return scale(x, 1.7); });
    unary("add_scalar", uniform({5}, r), [](const Td& x) { return add_scalar(x, 0.3); });
    unary("gelu", uniform({2, 5}, r, -3.0, 3.0), [](const Td& x) { return gelu(x); });
    unary("sigmoid", uniform({2, 5}, r, -4.0, 4.0), [](const Td& x) { return sigmoid(x); });
    unary("exp", uniform({2, 5}, r, -2.0, 2.0), [](const Td& x) { return exp(x); });
    unary("log", uniform({2, 5}, r, 0.3, 3.0), [](const Td& x) { return log(x); });
    unary("abs", signed_band({2, 5}, r, 0.05, 1.0), [](const Td& x) { return abs(x); });
    // Entries in (-0.45, 0.45) pass through; |x| in (0.55, 1) are clamped.
    Td cl = signed_band({2, 5}, r, 0.0, 0.45);
    for (std::size_t i = 0; i < 4; ++i) cl.mutable_data()[i] = (i % 2 ? -1.0 : 1.0) * r.uniform(0.55, 1.0);
    unary("clamp", cl, [](const Td& x) { return clamp(x, -0.5, 0.5); });
  }

  void structural() {
    Rng r = next_rng();
    unary("reshape", uniform({2, 6}, r), [](const Td& x) { return reshape(x, {3, 4}); });
    unary("transpose", uniform({2, 5}, r), [](const Td& x) { return transpose(x); });
    unary("slice_rows", uniform({5, 3}, r), [](const Td& x) { return slice_rows(x, 1, 3); });
    unary("slice_cols", uniform({3, 5}, r), [](const Td& x) { return slice_cols(x, 2, 2); });
    unary("gather", uniform({3, 4}, r), [](const Td& x) { return gather<double>(x, {0, 5, 5, 11, 3}); });
    unary("split_tokens", uniform({5, 3}, r), [](const Td& x) {
      auto parts = split_tokens<double>(x, {2, 3});
      return concat_tokens<double>({parts[1], parts[0]});
    });
    {
      Rng rng = next_rng();
      Td a = uniform({2, 4}, rng), b = uniform({3, 4}, rng);
      check("concat_tokens", rng, {{"a", a}, {"b", b}}, [=] { return concat_tokens<double>({a, b}); });
      Td c = uniform({2, 3}, rng), d = uniform({2, 2}, rng);
      check("concat_cols", rng, {{"c", c}, {"d", d}}, [=] { return concat_cols<double>({c, d}); });
    }
    {
      Rng rng = next_rng();
      Td a = uniform({3, 5}, rng), b = uniform({5, 4}, rng);
      check("matmul", rng, {{"a", a}, {"b", b}}, [=] { return matmul(a, b); });
    }
  }

  void reductions() {
    Rng r = next_rng();
    unary("softmax_rows", uniform({3, 5}, r, -2.0, 2.0), [](const Td& x) { return softmax_rows(x); });
    unary("mean_pool", uniform({4, 3}, r), [](const Td& x) { return mean_pool(x); });
    unary("sum", uniform({4, 3}, r), [](const Td& x) { return sum(x); });
    unary("mean", uniform({4, 3}, r), [](const Td& x) { return mean(x); });
    {
      Rng rng = next_rng();
      Td x = uniform({3, 6}, rng, -2.0, 2.0), g = uniform({6}, rng, 0.5, 1.5), b = uniform({6}, rng);
      check("layer_norm", rng, {{"x", x}, {"gamma", g}, {"beta", b}}, [=] { return layer_norm(x, g, b, 1e-5); });
    }
  }

  void losses() {
    const LossConfig lc;
    const std::size_t S = 6;
    {
      Rng rng = next_rng();
      const BBox gt = random_box(rng);
      const GaussianTarget target = make_gaussian_target(gt, S);
      Td score = uniform({S, S}, rng, 0.05, 0.95);
      check("focal_loss", rng, {{"score", score}}, [=] { return focal_loss(score, target, lc); });
    }
    {
      Rng rng = next_rng();
      HeadOutput<double> out;
      out.grid = S;
      out.score = uniform({S, S}, rng, 0.1, 0.9, false);
      out.offset = uniform({2, S, S}, rng, 0.1, 0.9);
      out.size = uniform({2, S, S}, rng, 0.1, 0.3);
      const Cell cell{2 + rng.index(2), 2 + rng.index(2)};
      check("box_corners_at", rng, {{"offset", out.offset}, {"size", out.size}},
            [=] { return box_corners_at(out, cell); });
    }
    for (const bool overlapping : {true, false}) {
      Rng rng = next_rng();
      const BBox gt{0.3, 0.3, 0.3, 0.25};
      BBox p = overlapping ? BBox{0.25 + rng.uniform(0, 0.1), 0.35 + rng.uniform(0, 0.1), 0.2, 0.3}
                           : BBox{0.7 + rng.uniform(0, 0.05), 0.05 + rng.uniform(0, 0.05), 0.2, 0.15};
      Td c({4}, {p.x, p.y, p.right(), p.bottom()}, true);
      check(overlapping ? "giou_loss" : "giou_loss_disjoint", rng, {{"corners", c}}, [=] { return giou_loss(c, gt); });
      check(overlapping ? "l1_loss" : "l1_loss_disjoint", rng, {{"corners", c}}, [=] { return l1_loss(c, gt); });
    }
  }

  void blocks() {
    const ModelConfig cfg = small_model();
    const ModelParams<double> model = ModelParams<double>::init(cfg, seed_);
    const double eps = cfg.ln_eps;
    {
      Rng rng = next_rng();
      Td x = uniform({5, cfg.dim}, rng);
      Leaves leaves = {{"x", x}};
      ParameterList<double> pl;
      model.encoder.layers[0].collect(pl, "layer", ParamGroup::kBackbone);
      for (auto& l : param_leaves(pl)) leaves.push_back(l);
      const auto& layer = model.encoder.layers[0];
      check("encoder_layer", rng, leaves, [=, &layer] { return encoder_layer(x, layer, eps); });
    }
    {
      Rng rng = next_rng();
      const std::size_t nz = cfg.template_tokens(), nx = cfg.search_tokens();
      Td st = uniform({nz, cfg.dim}, rng), z = uniform({nz, cfg.dim}, rng), x = uniform({nx, cfg.dim}, rng);
      Leaves leaves = {{"state", st}, {"template", z}, {"search", x}};
      ParameterList<double> pl;
      model.temporal.collect(pl, "temporal");
      for (auto& l : param_leaves(pl)) leaves.push_back(l);
      const auto& tp = model.temporal;
      check("spatio_temporal_encode", rng, leaves, [=, &tp] { return spatio_temporal_encode(st, z, x, tp, eps); });
      Leaves sl = {{"state", st}};
      ParameterList<double> fl;
      model.prompts.spatiotemporal_ffn.collect(fl, "ffn", ParamGroup::kOther);
      for (auto& l : param_leaves(fl)) sl.push_back(l);
      const auto& ffn = model.prompts.spatiotemporal_ffn;
      check("gen_spatiotemporal_prompt", rng, sl, [=, &ffn] { return gen_spatiotemporal_prompt(st, ffn); });
    }
    {
      Rng rng = next_rng();
      const ImageCrop tmpl{random_image(cfg.template_size, rng), CropKind::kTemplate};
      ParameterList<double> pl;
      model.prompts.collect(pl, "prompts");
      Leaves leaves;
      for (auto& l : param_leaves(pl))
        if (l.first.find("spatiotemporal") == std::string::npos) leaves.push_back(l);
      const auto& pp = model.prompts;
      check("gen_multiscale_prompt", rng, leaves, [=, &pp] { return gen_multiscale_prompt(tmpl, pp, cfg); }, 0.0,
            opts_.model_coords * 4);
    }
    {
      Rng rng = next_rng();
      const ImageCrop search{random_image(cfg.search_size, rng), CropKind::kSearch};
      ParameterList<double> pl;
      model.embed.collect(pl, "embed");
      const auto& ep = model.embed;
      check("patch_embed", rng, param_leaves(pl), [=, &ep] { return patch_embed(search, ep, cfg); }, 0.0,
            opts_.model_coords * 4);
    }
    {
      Rng rng = next_rng();
      Td x = uniform({cfg.search_tokens(), cfg.dim}, rng);
      Leaves leaves = {{"tokens", x}};
      ParameterList<double> pl;
      model.head.collect(pl, "head");
      for (auto& l : param_leaves(pl)) leaves.push_back(l);
      const auto& hp = model.head;
      check("head_forward", rng, leaves, [=, &hp] {
        const HeadOutput<double> h = head_forward(x, hp);
        return concat_cols<double>({reshape(h.score, {1, h.grid * h.grid}),
                                    reshape(h.offset, {1, 2 * h.grid * h.grid}),
                                    reshape(h.size, {1, 2 * h.grid * h.grid})});
      });
    }
  }

  void end_to_end() {
    const ModelConfig cfg = small_model();
    const ModelParams<double> model = ModelParams<double>::init(cfg, 100 + seed_);
    Rng rng = next_rng();
    TrainingSequence seq;
    seq.template_crop = {random_image(cfg.template_size, rng), CropKind::kTemplate};
    for (std::size_t k = 0; k < 2; ++k) {
      seq.search.push_back({random_image(cfg.search_size, rng), CropKind::kSearch});
      seq.targets.push_back(random_box(rng));
      seq.frame_indices.push_back(k + 1);
    }
    const LossConfig lc;
    GradCheckOptions o;
    o.seed = seed_;
    o.max_coords = opts_.model_coords;
    const auto f = [&]() { return sequence_loss(model, seq, lc, false).mean; };
    cases_.push_back({"sequence_loss", seed_, opts_.model_tolerance,
                      grad_check_leaves<double>(f, param_leaves(model.parameters()), o)});
  }

  GradSuiteOptions opts_;
  std::uint64_t seed_ = 0;
  std::uint64_t index_ = 0;
  std::vector<GradSuiteCase> cases_;
};

}  // namespace

std::vector<GradSuiteCase> run_grad_suite(const GradSuiteOptions& options) { return Suite(options).run(); }

}  // namespace evp
