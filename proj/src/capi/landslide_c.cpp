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
#include "landslide/landslide.h"

#include <exception>
#include <new>
#include <string>

#include "../cli/commands.hpp"
#include "landslide/core.hpp"
#include "landslide/error.hpp"
#include "landslide/mbt.hpp"
#include "landslide/model.hpp"
#include "landslide/svm.hpp"

struct lsd_image {
  landslide::MultiBandImage value;
};
struct lsd_cnn {
  landslide::model::Checkpoint value;
};
struct lsd_svm {
  landslide::svm::SvmModel value;
};

namespace {

thread_local std::string g_last_error;

lsd_status fail(lsd_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
lsd_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return LSD_OK;
  } catch (const landslide::Error& e) {
    return fail(static_cast<lsd_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LSD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LSD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LSD_ERR_INTERNAL, "unknown exception");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw landslide::ArgumentError(std::string(what) + " is NULL");
}

}  // namespace

extern "C" {

const char* lsd_version(void) { return LANDSLIDE_VERSION; }

const char* lsd_status_name(lsd_status status) {
  switch (status) {
    case LSD_OK: return "ok";
    case LSD_ERR_ARGUMENT: return "argument";
    case LSD_ERR_DIMENSION: return "dimension";
    case LSD_ERR_EMPTY_DATASET: return "empty-dataset";
    case LSD_ERR_INSUFFICIENT_DATA: return "insufficient-data";
    case LSD_ERR_DEGENERATE_DATA: return "degenerate-data";
    case LSD_ERR_IO: return "io";
    case LSD_ERR_FORMAT: return "format";
    case LSD_ERR_NUMERIC: return "numeric";
    case LSD_ERR_CONFIG: return "config";
    case LSD_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* lsd_last_error(void) { return g_last_error.c_str(); }

const char* lsd_command_names(void) { return landslide::cli::command_names(); }

lsd_status lsd_run_command(const char* name, const char* request_json, lsd_log_fn log, void* user) {
  return guarded([&] {
    require(name, "command name");
    const landslide::cli::Sink sink = [&](landslide::cli::Channel ch, const std::string& line) {
      if (log != nullptr) log(user, static_cast<int>(ch), line.c_str());
    };
    landslide::cli::run_command(name, request_json ? request_json : "{}", sink);
  });
}

lsd_status lsd_image_create(size_t height, size_t width, size_t channels, const double* data, lsd_image** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = nullptr;
    std::vector<double> values(data, data + height * width * channels);
    *out = new lsd_image{landslide::MultiBandImage(height, width, channels, std::move(values))};
  });
}

lsd_status lsd_image_load(const char* path, lsd_image** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new lsd_image{landslide::read_mbt(path)};
  });
}

lsd_status lsd_image_save(const lsd_image* image, const char* path) {
  return guarded([&] {
    require(image, "image");
    require(path, "path");
    landslide::write_mbt(path, image->value);
  });
}

void lsd_image_free(lsd_image* image) { delete image; }

lsd_status lsd_image_shape(const lsd_image* image, size_t* height, size_t* width, size_t* channels) {
  return guarded([&] {
    require(image, "image");
    if (height) *height = image->value.height();
    if (width) *width = image->value.width();
    if (channels) *channels = image->value.channels();
  });
}

lsd_status lsd_image_data(const lsd_image* image, double* out, size_t capacity, size_t* written) {
  return guarded([&] {
    require(image, "image");
    const auto data = image->value.data();
    if (written) *written = data.size();
    if (out == nullptr) return;
    if (capacity < data.size()) {
      throw landslide::DimensionError("buffer holds " + std::to_string(capacity) + " values, image has " +
                                      std::to_string(data.size()));
    }
    std::copy(data.begin(), data.end(), out);
  });
}

lsd_status lsd_image_resize(const lsd_image* image, size_t height, size_t width, lsd_image** out) {
  return guarded([&] {
    require(image, "image");
    require(out, "out");
    *out = nullptr;
    *out = new lsd_image{landslide::resize_bilinear(image->value, height, width)};
  });
}

lsd_status lsd_ssim(const lsd_image* a, const lsd_image* b, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = landslide::ssim(a->value, b->value);
  });
}

lsd_status lsd_cnn_load(const char* path, lsd_cnn** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new lsd_cnn{landslide::model::load_checkpoint(path)};
  });
}

void lsd_cnn_free(lsd_cnn* cnn) { delete cnn; }

lsd_status lsd_cnn_embedding_dim(const lsd_cnn* cnn, size_t* out) {
  return guarded([&] {
    require(cnn, "cnn");
    require(out, "out");
    *out = cnn->value.net.embedding_dim();
  });
}

namespace {

landslide::model::ForwardResult forward_one(const lsd_cnn* cnn, const lsd_image* image) {
  require(cnn, "cnn");
  require(image, "image");
  return landslide::model::forward(cnn->value.net, std::span(&image->value, 1));
}

}  // namespace

lsd_status lsd_cnn_predict(const lsd_cnn* cnn, const lsd_image* image, double* probability) {
  return guarded([&] {
    require(probability, "probability");
    const auto fr = forward_one(cnn, image);
    *probability = landslide::model::softmax(fr.logits.front())[1];
  });
}

lsd_status lsd_cnn_embed(const lsd_cnn* cnn, const lsd_image* image, double* out, size_t capacity) {
  return guarded([&] {
    require(out, "out");
    const auto fr = forward_one(cnn, image);
    const auto& e = fr.embeddings.front();
    if (capacity < e.size()) {
      throw landslide::DimensionError("buffer holds " + std::to_string(capacity) + " values, embedding has " +
                                      std::to_string(e.size()));
    }
    std::copy(e.begin(), e.end(), out);
  });
}

lsd_status lsd_svm_load(const char* path, lsd_svm** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new lsd_svm{landslide::svm::load_model(path)};
  });
}

void lsd_svm_free(lsd_svm* svm) { delete svm; }

lsd_status lsd_svm_decision(const lsd_svm* svm, const double* features, size_t dim, double* out) {
  return guarded([&] {
    require(svm, "svm");
    require(features, "features");
    require(out, "out");
    if (dim != svm->value.dim()) {
      throw landslide::DimensionError("feature length " + std::to_string(dim) + " does not match model dimension " +
                                      std::to_string(svm->value.dim()));
    }
    *out = landslide::svm::decision(svm->value, std::span(features, dim));
  });
}

}  // extern "C"
