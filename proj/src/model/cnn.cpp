/**
 * Copyright 2026 The Landslide Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <algorithm>
#include <cmath>
#include <sstream>

#include "../common/parallel.hpp"
#include "landslide/error.hpp"
#include "landslide/model.hpp"

namespace landslide::model {

void CnnConfig::validate() const {
  if (input_channels <= 0 || input_height <= 0 || input_width <= 0) {
    throw ArgumentError("cnn: input extents must be positive");
  }
  if (conv_channels.empty()) throw ArgumentError("cnn: at least one conv stage is required");
  for (int c : conv_channels) {
    if (c <= 0) throw ArgumentError("cnn: conv channels must be positive");
  }
  if (kernel <= 0 || kernel % 2 == 0) throw ArgumentError("cnn: kernel must be a positive odd integer");
  if (embedding_dim <= 0) throw ArgumentError("cnn: embedding_dim must be positive");
}

CompactCnn::CompactCnn(CnnConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto k = static_cast<std::size_t>(config_.kernel);
  std::size_t in = static_cast<std::size_t>(config_.input_channels);
  for (std::size_t i = 0; i < config_.conv_channels.size(); ++i) {
    const auto out = static_cast<std::size_t>(config_.conv_channels[i]);
    const std::string prefix = "conv" + std::to_string(i);
    params_.push_back({prefix + ".weight", {k, k, in, out}, std::vector<double>(k * k * in * out, 0.0)});
    params_.push_back({prefix + ".bias", {out}, std::vector<double>(out, 0.0)});
    in = out;
  }
  const auto emb = static_cast<std::size_t>(config_.embedding_dim);
  params_.push_back({"embed.weight", {in, emb}, std::vector<double>(in * emb, 0.0)});
  params_.push_back({"embed.bias", {emb}, std::vector<double>(emb, 0.0)});
  params_.push_back({"head.weight", {emb, kClasses}, std::vector<double>(emb * kClasses, 0.0)});
  params_.push_back({"head.bias", {kClasses}, std::vector<double>(kClasses, 0.0)});
}

CompactCnn CompactCnn::initialized(CnnConfig config, Rng& rng) {
  CompactCnn net(std::move(config));
  for (auto& p : net.params_) {
    if (p.shape.size() == 1) continue;  // biases stay zero
    std::size_t fan_in = 1;
    for (std::size_t d = 0; d + 1 < p.shape.size(); ++d) fan_in *= p.shape[d];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (auto& v : p.values) v = rng.uniform(-limit, limit);
  }
  return net;
}

std::size_t CompactCnn::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

void CompactCnn::round_to_float() {
  for (auto& p : params_) {
    for (auto& v : p.values) v = static_cast<double>(static_cast<float>(v));
  }
}

bool CompactCnn::all_finite() const noexcept {
  for (const auto& p : params_) {
    for (double v : p.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

namespace {

// "Same" convolution, stride 1, weights laid out [ky][kx][cin][cout].
void conv_forward(const double* in, std::size_t h, std::size_t w, std::size_t cin, const double* weight,
                  const double* bias, std::size_t cout, int k, double* out) {
  const int pad = k / 2;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double* o = out + (y * w + x) * cout;
      std::copy_n(bias, cout, o);
      for (int ky = 0; ky < k; ++ky) {
        const long iy = static_cast<long>(y) + ky - pad;
        if (iy < 0 || iy >= static_cast<long>(h)) continue;
        for (int kx = 0; kx < k; ++kx) {
          const long ix = static_cast<long>(x) + kx - pad;
          if (ix < 0 || ix >= static_cast<long>(w)) continue;
          const double* src = in + (static_cast<std::size_t>(iy) * w + static_cast<std::size_t>(ix)) * cin;
          const double* wk = weight + static_cast<std::size_t>(ky * k + kx) * cin * cout;
          for (std::size_t ci = 0; ci < cin; ++ci) {
            const double v = src[ci];
            const double* wrow = wk + ci * cout;
            for (std::size_t co = 0; co < cout; ++co) o[co] += v * wrow[co];
          }
        }
      }
    }
  }
}

void conv_backward(const double* in, std::size_t h, std::size_t w, std::size_t cin, const double* weight,
                   std::size_t cout, int k, const double* dout, double* dweight, double* dbias, double* din) {
  const int pad = k / 2;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double* g = dout + (y * w + x) * cout;
      // Max pooling routes gradient to one pixel in four; skip the rest.
      if (std::all_of(g, g + cout, [](double v) { return v == 0.0; })) continue;
      for (std::size_t co = 0; co < cout; ++co) dbias[co] += g[co];
      for (int ky = 0; ky < k; ++ky) {
        const long iy = static_cast<long>(y) + ky - pad;
        if (iy < 0 || iy >= static_cast<long>(h)) continue;
        for (int kx = 0; kx < k; ++kx) {
          const long ix = static_cast<long>(x) + kx - pad;
          if (ix < 0 || ix >= static_cast<long>(w)) continue;
          const std::size_t src_off = (static_cast<std::size_t>(iy) * w + static_cast<std::size_t>(ix)) * cin;
          const std::size_t wk_off = static_cast<std::size_t>(ky * k + kx) * cin * cout;
          for (std::size_t ci = 0; ci < cin; ++ci) {
            const double v = in[src_off + ci];
            double* __restrict dw = dweight + wk_off + ci * cout;
            for (std::size_t co = 0; co < cout; ++co) dw[co] += v * g[co];
          }
          if (din) {
            for (std::size_t ci = 0; ci < cin; ++ci) {
              const double* __restrict wr = weight + wk_off + ci * cout;
              double acc = 0.0;
              for (std::size_t co = 0; co < cout; ++co) acc += wr[co] * g[co];
              din[src_off + ci] += acc;
            }
          }
        }
      }
    }
  }
}

SampleCache forward_one(const CompactCnn& net, const MultiBandImage& img) {
  const auto& cfg = net.config();
  if (img.height() != static_cast<std::size_t>(cfg.input_height) ||
      img.width() != static_cast<std::size_t>(cfg.input_width) ||
      img.channels() != static_cast<std::size_t>(cfg.input_channels)) {
    std::ostringstream os;
    os << "forward: image " << img.shape_string() << " does not match network input " << cfg.input_height << "x"
       << cfg.input_width << "x" << cfg.input_channels;
    throw DimensionError(os.str());
  }
  SampleCache c;
  std::vector<double> x(img.data().begin(), img.data().end());
  std::size_t h = img.height();
  std::size_t w = img.width();
  std::size_t cin = img.channels();
  for (std::size_t s = 0; s < cfg.conv_channels.size(); ++s) {
    const auto cout = static_cast<std::size_t>(cfg.conv_channels[s]);
    std::vector<double> z(h * w * cout);
    conv_forward(x.data(), h, w, cin, net.conv_weight(s).values.data(), net.conv_bias(s).values.data(), cout,
                 cfg.kernel, z.data());
    // ReLU then 2x2 max pool (ceil mode, edge windows clipped); pooling the
    // pre-activation and rectifying afterwards is equivalent.
    const std::size_t ph = (h + 1) / 2;
    const std::size_t pw = (w + 1) / 2;
    std::vector<double> pooled(ph * pw * cout);
    std::vector<std::uint32_t> arg(ph * pw * cout);
    for (std::size_t py = 0; py < ph; ++py) {
      for (std::size_t px = 0; px < pw; ++px) {
        for (std::size_t co = 0; co < cout; ++co) {
          std::size_t best = ((2 * py) * w + 2 * px) * cout + co;
          for (std::size_t dy = 0; dy < 2 && 2 * py + dy < h; ++dy) {
            for (std::size_t dx = 0; dx < 2 && 2 * px + dx < w; ++dx) {
              const std::size_t idx = ((2 * py + dy) * w + 2 * px + dx) * cout + co;
              if (z[idx] > z[best]) best = idx;
            }
          }
          const std::size_t o = (py * pw + px) * cout + co;
          pooled[o] = std::max(0.0, z[best]);
          arg[o] = static_cast<std::uint32_t>(best);
        }
      }
    }
    c.stage_input.push_back(std::move(x));
    c.preact.push_back(std::move(z));
    c.pool_argmax.push_back(std::move(arg));
    c.stage_h.push_back(h);
    c.stage_w.push_back(w);
    x = std::move(pooled);
    h = ph;
    w = pw;
    cin = cout;
  }

  c.pooled_features.assign(cin, 0.0);
  for (std::size_t p = 0; p < h * w; ++p) {
    for (std::size_t ch = 0; ch < cin; ++ch) c.pooled_features[ch] += x[p * cin + ch];
  }
  const double inv = 1.0 / static_cast<double>(h * w);
  for (auto& v : c.pooled_features) v *= inv;

  const std::size_t emb = net.embedding_dim();
  const auto& ew = net.embed_weight().values;
  c.embedding = net.embed_bias().values;
  for (std::size_t i = 0; i < cin; ++i) {
    const double f = c.pooled_features[i];
    for (std::size_t j = 0; j < emb; ++j) c.embedding[j] += f * ew[i * emb + j];
  }
  const auto& hw = net.head_weight().values;
  c.logits = net.head_bias().values;
  for (std::size_t j = 0; j < emb; ++j) {
    for (std::size_t k = 0; k < 2; ++k) c.logits[k] += c.embedding[j] * hw[j * 2 + k];
  }
  return c;
}

void backward_one(const CompactCnn& net, const SampleCache& c, std::span<const double> dlogits,
                  std::vector<std::vector<double>>& grads) {
  const auto& cfg = net.config();
  const std::size_t np = net.params().size();
  const std::size_t emb = net.embedding_dim();
  const std::size_t feat = net.feature_dim();

  auto& g_hw = grads[np - 2];
  auto& g_hb = grads[np - 1];
  const auto& hw = net.head_weight().values;
  std::vector<double> demb(emb, 0.0);
  for (std::size_t k = 0; k < 2; ++k) g_hb[k] += dlogits[k];
  for (std::size_t j = 0; j < emb; ++j) {
    for (std::size_t k = 0; k < 2; ++k) {
      g_hw[j * 2 + k] += c.embedding[j] * dlogits[k];
      demb[j] += hw[j * 2 + k] * dlogits[k];
    }
  }

  auto& g_ew = grads[np - 4];
  auto& g_eb = grads[np - 3];
  const auto& ew = net.embed_weight().values;
  std::vector<double> dfeat(feat, 0.0);
  for (std::size_t j = 0; j < emb; ++j) g_eb[j] += demb[j];
  for (std::size_t i = 0; i < feat; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < emb; ++j) {
      g_ew[i * emb + j] += c.pooled_features[i] * demb[j];
      acc += ew[i * emb + j] * demb[j];
    }
    dfeat[i] = acc;
  }

  // Gradient w.r.t. the last pooled map: GAP spreads evenly.
  const std::size_t stages = cfg.conv_channels.size();
  const std::size_t ph = (c.stage_h.back() + 1) / 2;
  const std::size_t pw = (c.stage_w.back() + 1) / 2;
  std::vector<double> dpooled(ph * pw * feat);
  const double inv = 1.0 / static_cast<double>(ph * pw);
  for (std::size_t p = 0; p < ph * pw; ++p) {
    for (std::size_t ch = 0; ch < feat; ++ch) dpooled[p * feat + ch] = dfeat[ch] * inv;
  }

  for (std::size_t s = stages; s-- > 0;) {
    const std::size_t h = c.stage_h[s];
    const std::size_t w = c.stage_w[s];
    const auto cout = static_cast<std::size_t>(cfg.conv_channels[s]);
    const std::size_t cin = s == 0 ? static_cast<std::size_t>(cfg.input_channels)
                                   : static_cast<std::size_t>(cfg.conv_channels[s - 1]);
    std::vector<double> dz(h * w * cout, 0.0);
    const auto& z = c.preact[s];
    const auto& arg = c.pool_argmax[s];
    for (std::size_t o = 0; o < dpooled.size(); ++o) {
      const std::size_t idx = arg[o];
      if (z[idx] > 0.0) dz[idx] += dpooled[o];
    }
    std::vector<double> din;
    if (s > 0) din.assign(h * w * cin, 0.0);
    conv_backward(c.stage_input[s].data(), h, w, cin, net.conv_weight(s).values.data(), cout, cfg.kernel, dz.data(),
                  grads[2 * s].data(), grads[2 * s + 1].data(), s > 0 ? din.data() : nullptr);
    dpooled = std::move(din);
  }
}

}  // namespace

ForwardResult forward(const CompactCnn& net, std::span<const MultiBandImage> batch, bool keep_cache) {
  std::vector<SampleCache> caches(batch.size());
  detail::parallel_for(batch.size(), [&](std::size_t i) { caches[i] = forward_one(net, batch[i]); });
  ForwardResult r;
  r.embeddings.reserve(batch.size());
  r.logits.reserve(batch.size());
  for (auto& c : caches) {
    r.embeddings.push_back(c.embedding);
    r.logits.push_back(c.logits);
  }
  if (keep_cache) r.caches = std::move(caches);
  return r;
}

std::vector<std::vector<double>> backward(const CompactCnn& net, std::span<const SampleCache> caches,
                                          std::span<const std::vector<double>> dlogits) {
  if (caches.size() != dlogits.size()) throw DimensionError("backward: caches and dlogits differ in length");
  auto zeros = [&net] {
    std::vector<std::vector<double>> g;
    for (const auto& p : net.params()) g.emplace_back(p.size(), 0.0);
    return g;
  };
  std::vector<std::vector<std::vector<double>>> per_sample(caches.size());
  detail::parallel_for(caches.size(), [&](std::size_t i) {
    per_sample[i] = zeros();
    backward_one(net, caches[i], dlogits[i], per_sample[i]);
  });
  auto total = zeros();
  for (const auto& g : per_sample) {
    for (std::size_t k = 0; k < total.size(); ++k) {
      for (std::size_t j = 0; j < total[k].size(); ++j) total[k][j] += g[k][j];
    }
  }
  return total;
}

std::vector<double> predict_landslide(const CompactCnn& net, std::span<const MultiBandImage> images) {
  const auto r = forward(net, images);
  std::vector<double> p(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) p[i] = softmax(r.logits[i])[1];
  return p;
}

}  // namespace landslide::model
