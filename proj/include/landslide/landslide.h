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
/* Stable C interface to the landslide classification library.
 *
 * Every fallible call returns an lsd_status. On failure a description is
 * available from lsd_last_error() until the next call on the same thread.
 * Handles are opaque and owned by the caller; release them with the matching
 * *_free function. Passing NULL to a *_free function is a no-op. */
#ifndef LANDSLIDE_LANDSLIDE_H_
#define LANDSLIDE_LANDSLIDE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LSD_API __declspec(dllexport)
#else
#define LSD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lsd_status {
  LSD_OK = 0,
  LSD_ERR_ARGUMENT = 1,
  LSD_ERR_DIMENSION = 2,
  LSD_ERR_EMPTY_DATASET = 3,
  LSD_ERR_INSUFFICIENT_DATA = 4,
  LSD_ERR_DEGENERATE_DATA = 5,
  LSD_ERR_IO = 6,
  LSD_ERR_FORMAT = 7,
  LSD_ERR_NUMERIC = 8,
  LSD_ERR_CONFIG = 9,
  LSD_ERR_INTERNAL = 10
} lsd_status;

typedef struct lsd_image lsd_image;
typedef struct lsd_cnn lsd_cnn;
typedef struct lsd_svm lsd_svm;

/* Channel passed to the log callback. */
typedef enum lsd_channel { LSD_CHANNEL_RESULT = 1, LSD_CHANNEL_LOG = 2 } lsd_channel;
typedef void (*lsd_log_fn)(void* user, int channel, const char* line);

LSD_API const char* lsd_version(void);
LSD_API const char* lsd_status_name(lsd_status status);
/* Thread-local message of the last failed call; never NULL. */
LSD_API const char* lsd_last_error(void);

/* Runs a named command ("make-synth", "oversample", "train", "fit-svm",
 * "evaluate", "predict", "crossval", "occlusion") with a JSON object of
 * options. Output lines are delivered to `log`, which may be NULL. */
LSD_API lsd_status lsd_run_command(const char* name, const char* request_json, lsd_log_fn log, void* user);
/* Space-separated list of command names. */
LSD_API const char* lsd_command_names(void);

/* Images: H x W x C, channel-last, row-major doubles. */
LSD_API lsd_status lsd_image_create(size_t height, size_t width, size_t channels, const double* data, lsd_image** out);
LSD_API lsd_status lsd_image_load(const char* path, lsd_image** out);
LSD_API lsd_status lsd_image_save(const lsd_image* image, const char* path);
LSD_API void lsd_image_free(lsd_image* image);
LSD_API lsd_status lsd_image_shape(const lsd_image* image, size_t* height, size_t* width, size_t* channels);
/* Copies up to `capacity` values; `written` receives H*W*C. */
LSD_API lsd_status lsd_image_data(const lsd_image* image, double* out, size_t capacity, size_t* written);
LSD_API lsd_status lsd_image_resize(const lsd_image* image, size_t height, size_t width, lsd_image** out);
LSD_API lsd_status lsd_ssim(const lsd_image* a, const lsd_image* b, double* out);

/* CNN checkpoints (".cnn"). Probabilities are for the landslide class. The
 * image must already be band-selected, resized and normalized. */
LSD_API lsd_status lsd_cnn_load(const char* path, lsd_cnn** out);
LSD_API void lsd_cnn_free(lsd_cnn* cnn);
LSD_API lsd_status lsd_cnn_embedding_dim(const lsd_cnn* cnn, size_t* out);
LSD_API lsd_status lsd_cnn_predict(const lsd_cnn* cnn, const lsd_image* image, double* probability);
LSD_API lsd_status lsd_cnn_embed(const lsd_cnn* cnn, const lsd_image* image, double* out, size_t capacity);

/* SVM heads (".svm"). */
LSD_API lsd_status lsd_svm_load(const char* path, lsd_svm** out);
LSD_API void lsd_svm_free(lsd_svm* svm);
LSD_API lsd_status lsd_svm_decision(const lsd_svm* svm, const double* features, size_t dim, double* out);

#ifdef __cplusplus
}
#endif

#endif /* LANDSLIDE_LANDSLIDE_H_ */
