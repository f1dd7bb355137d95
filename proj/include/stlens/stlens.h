/* C interface of the stlens library. Every object is an opaque handle owned
 * by the caller and released with its *_destroy function. Functions return a
 * stlens_status; on failure stlens_last_error() holds a one-line message for
 * the calling thread. */
#ifndef STLENS_H
#define STLENS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef STLENS_BUILDING
#    define STLENS_API __declspec(dllexport)
#  else
#    define STLENS_API __declspec(dllimport)
#  endif
#else
#  define STLENS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stlens_status {
    STLENS_OK = 0,
    STLENS_ERR_INVALID_ARGUMENT = 1,
    STLENS_ERR_IO = 2,
    STLENS_ERR_PARSE = 3,
    STLENS_ERR_DATA_GAP = 4,
    STLENS_ERR_DUPLICATE_MONTH = 5,
    STLENS_ERR_INSUFFICIENT_DATA = 6,
    STLENS_ERR_DIMENSION_MISMATCH = 7,
    STLENS_ERR_DEGENERATE = 8,
    STLENS_ERR_CONVERGENCE = 9,
    STLENS_ERR_INTERNAL = 10,
} stlens_status;

typedef struct stlens_config stlens_config;
typedef struct stlens_series stlens_series;
typedef struct stlens_decomposition stlens_decomposition;
typedef struct stlens_pipeline stlens_pipeline;
typedef struct stlens_forecast stlens_forecast;
typedef struct stlens_grid stlens_grid;
typedef struct stlens_report stlens_report;

STLENS_API const char* stlens_version(void);
/* Upper-case code name, e.g. "DATA_GAP". */
STLENS_API const char* stlens_status_name(stlens_status status);
/* Message of the last failed call on this thread; "" when none. */
STLENS_API const char* stlens_last_error(void);

/* Run configuration (flat key = value). */
STLENS_API stlens_status stlens_config_create(stlens_config** out);
STLENS_API void stlens_config_destroy(stlens_config* config);
STLENS_API stlens_status stlens_config_load_file(stlens_config* config, const char* path);
STLENS_API stlens_status stlens_config_set(stlens_config* config, const char* key, const char* value);
/* Copies the value and its terminator into buf when it fits; *needed gets the
 * required size including the terminator. */
STLENS_API stlens_status stlens_config_get(const stlens_config* config, const char* key, char* buf, size_t cap,
                                           size_t* needed);
STLENS_API stlens_status stlens_config_write(const stlens_config* config, const char* path);

/* Monthly series. */
STLENS_API stlens_status stlens_series_load_csv(const stlens_config* config, const char* path, stlens_series** out);
STLENS_API stlens_status stlens_series_from_values(int start_year, int start_month, int period, const double* values,
                                                   size_t count, stlens_series** out);
/* Trend plus sinusoidal season plus Gaussian noise, from the synth.* keys and seed. */
STLENS_API stlens_status stlens_series_synthetic(const stlens_config* config, stlens_series** out);
STLENS_API void stlens_series_destroy(stlens_series* series);
STLENS_API size_t stlens_series_length(const stlens_series* series);
STLENS_API stlens_status stlens_series_values(const stlens_series* series, double* out, size_t cap);
STLENS_API stlens_status stlens_series_write_csv(const stlens_config* config, const stlens_series* series,
                                                 const char* path);

typedef struct stlens_summary {
    size_t count;
    double max;
    double min;
    double mean;
    double median;
    double std_dev;
} stlens_summary;

/* Statistics of the lag-embedded targets: all rows, training rows, test rows. */
STLENS_API stlens_status stlens_summarize(const stlens_series* series, const stlens_config* config,
                                          stlens_summary out[3]);
STLENS_API stlens_status stlens_summary_write_csv(const stlens_summary summaries[3], const char* path);

/* STL decomposition. */
enum { STLENS_OBSERVED = 0, STLENS_SEASONAL = 1, STLENS_TREND = 2, STLENS_REMAINDER = 3 };
STLENS_API stlens_status stlens_decompose(const stlens_series* series, const stlens_config* config,
                                          stlens_decomposition** out);
STLENS_API void stlens_decomposition_destroy(stlens_decomposition* parts);
STLENS_API size_t stlens_decomposition_length(const stlens_decomposition* parts);
STLENS_API stlens_status stlens_decomposition_component(const stlens_decomposition* parts, int which, double* out,
                                                        size_t cap);
STLENS_API stlens_status stlens_decomposition_write_csv(const stlens_decomposition* parts, const char* path);
STLENS_API stlens_status stlens_decomposition_write_svg(const stlens_decomposition* parts, const char* path);

/* Fitted pipeline for the configured variant. */
STLENS_API stlens_status stlens_pipeline_fit(const stlens_series* series, const stlens_config* config,
                                             stlens_pipeline** out);
STLENS_API void stlens_pipeline_destroy(stlens_pipeline* pipeline);
STLENS_API size_t stlens_pipeline_model_count(const stlens_pipeline* pipeline);
STLENS_API size_t stlens_pipeline_pca_components(const stlens_pipeline* pipeline, size_t model);
STLENS_API size_t stlens_pipeline_train_rows(const stlens_pipeline* pipeline);
/* One row per modelled component: learner, training rows, PCA components. */
STLENS_API stlens_status stlens_pipeline_write_csv(const stlens_pipeline* pipeline, const char* path);
/* Explained-variance ratio of every principal component of every model. */
STLENS_API stlens_status stlens_pipeline_write_variance_csv(const stlens_pipeline* pipeline, const char* path);

/* Forecasts. */
STLENS_API stlens_status stlens_forecast_test(const stlens_pipeline* pipeline, int horizon, stlens_forecast** out);
/* Every target from the first month with enough history to the end of the data. */
STLENS_API stlens_status stlens_forecast_all(const stlens_pipeline* pipeline, int horizon, stlens_forecast** out);
/* Targets [begin, end) computed from `observations` instead of the fitted
 * series (same calendar grid); NULL uses the fitted series. */
STLENS_API stlens_status stlens_forecast_range(const stlens_pipeline* pipeline, int horizon, size_t begin, size_t end,
                                               const stlens_series* observations, stlens_forecast** out);
STLENS_API void stlens_forecast_destroy(stlens_forecast* forecast);
STLENS_API size_t stlens_forecast_length(const stlens_forecast* forecast);
STLENS_API size_t stlens_forecast_first_index(const stlens_forecast* forecast);
STLENS_API stlens_status stlens_forecast_values(const stlens_forecast* forecast, double* out, size_t cap);
STLENS_API stlens_status stlens_forecast_write_csv(const stlens_forecast* forecast, const stlens_pipeline* pipeline,
                                                   const char* path);
/* Observed series overlaid with up to two forecasts (either may be NULL). */
STLENS_API stlens_status stlens_forecast_write_svg(const stlens_series* observed, const stlens_forecast* h1,
                                                   const stlens_forecast* h2, size_t split_index, const char* path);

/* Grid search over learner assignments; candidates are comma-separated kind
 * names per component, or NULL for all six kinds. */
STLENS_API stlens_status stlens_gridsearch(const stlens_series* series, const stlens_config* config,
                                           const char* seasonal, const char* trend, const char* remainder,
                                           stlens_grid** out);
STLENS_API void stlens_grid_destroy(stlens_grid* grid);
STLENS_API size_t stlens_grid_count(const stlens_grid* grid);
/* Label "seasonal/trend/remainder" of rank `index` and its score (+inf when it failed). */
STLENS_API stlens_status stlens_grid_entry(const stlens_grid* grid, size_t index, char* label, size_t cap,
                                           double* score);
STLENS_API stlens_status stlens_grid_write_csv(const stlens_grid* grid, const char* path);

/* Model comparison at the configured horizon. */
STLENS_API stlens_status stlens_evaluate(const stlens_series* series, const stlens_config* config,
                                         stlens_report** out);
STLENS_API void stlens_report_destroy(stlens_report* report);
STLENS_API size_t stlens_report_row_count(const stlens_report* report);

typedef struct stlens_report_row {
    const char* model; /* valid while the report lives */
    int horizon;
    double rrmse;
    double r_squared;
    int has_dm;
    double dm_statistic;
    double dm_p_value;
} stlens_report_row;

STLENS_API stlens_status stlens_report_row_at(const stlens_report* report, size_t index, stlens_report_row* out);
STLENS_API stlens_status stlens_report_write_csv(const stlens_report* report, int with_reference, const char* path);
/* Kept PCA components of each model of each compared pipeline. */
STLENS_API stlens_status stlens_report_write_pca_csv(const stlens_report* report, const char* path);

typedef struct stlens_dm_result {
    double statistic;
    double p_value;
    int horizon;
    size_t n;
} stlens_dm_result;

/* Diebold-Mariano test on squared-error losses; `hln` enables the
 * small-sample correction with a Student-t reference. */
STLENS_API stlens_status stlens_dm_test(const double* errors_a, const double* errors_b, size_t count, int horizon,
                                        int hln, stlens_dm_result* out);

#ifdef __cplusplus
}
#endif

#endif
