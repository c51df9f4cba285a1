/* Copyright 2025 The swaplru Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of libswaplru: toric-code memory experiments with SWAP-based
 * leakage reduction, Rydberg decay noise and matching decoders.
 *
 * Every call returns an slru_status. On failure slru_last_error() gives a
 * message for the calling thread. Handles are opaque and owned by the caller.
 */

#ifndef SWAPLRU_H
#define SWAPLRU_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SWAPLRU_BUILDING)
#define SLRU_API __declspec(dllexport)
#else
#define SLRU_API __declspec(dllimport)
#endif
#else
#define SLRU_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum slru_status {
    SLRU_OK = 0,
    SLRU_ERR_ARGUMENT = 1, /* bad key, value or handle */
    SLRU_ERR_CONFIG = 2,   /* configuration rejected by validation */
    SLRU_ERR_IO = 3,
    SLRU_ERR_MISMATCH = 4,    /* verify_tables found a differing row */
    SLRU_ERR_FIT = 5,         /* fit did not converge; report still produced */
    SLRU_ERR_INTERNAL = 6
} slru_status;

typedef struct slru_config slru_config;
typedef struct slru_text slru_text;

typedef struct slru_cell {
    int d;
    int rounds;
    double p;
    const char* decoder;
    int64_t shots;
    int64_t fail[4]; /* X1, X2, Z1, Z2 */
} slru_cell;

/* Called once per finished (d, p, decoder) cell. */
typedef void (*slru_progress_fn)(const slru_cell* cell, void* user);

SLRU_API const char* slru_version(void);
SLRU_API const char* slru_last_error(void);
SLRU_API const char* slru_status_string(slru_status s);

/* Text results. The pointer stays valid until slru_text_free. */
SLRU_API const char* slru_text_data(const slru_text* t);
SLRU_API size_t slru_text_size(const slru_text* t);
SLRU_API void slru_text_free(slru_text* t);

SLRU_API slru_status slru_config_new(slru_config** out);
SLRU_API void slru_config_free(slru_config* cfg);

/*
 * Keys: run_id, d, rounds, p, re, eta, decoder, variant, detect,
 * detect_ratio, shots, min_failures, max_shots, seed, workers, z_basis,
 * timing. d, p and decoder take comma separated lists.
 */
SLRU_API slru_status slru_config_set(slru_config* cfg, const char* key, const char* value);
SLRU_API slru_status slru_config_validate(const slru_config* cfg);

/* Runs the sweep and returns the CSV (with header). */
SLRU_API slru_status slru_simulate(const slru_config* cfg, slru_progress_fn progress, void* user, slru_text** csv);

/* observable: "x2" or "both". */
SLRU_API slru_status slru_fit_threshold(const char* csv, const char* observable, slru_text** report);
SLRU_API slru_status slru_fit_distance(const char* csv, const char* observable, double p_ref, slru_text** report);

/* Derived fault tables against the embedded reference, both variants. */
SLRU_API slru_status slru_verify_tables(slru_text** report);

/*
 * Exhaustive injection of faults "round:slot:stab:kind" (kind lc, lt, ll or
 * a Pauli pair like XI) into the first d of cfg at its first p.
 * basis: "X" or "Z".
 */
SLRU_API slru_status slru_inject(const slru_config* cfg, const char* const* faults, size_t count, const char* basis,
                                 slru_text** report);

/* Every placement of k (1 or 2) correlated two-atom faults at slot 1. */
SLRU_API slru_status slru_scan_critical(const slru_config* cfg, int k, const char* basis, slru_text** report);

/* One line per edge: detectors, p, weight, observable bits, mechanism. */
SLRU_API slru_status slru_dump_graph(const slru_config* cfg, const char* basis, slru_text** dump);

#ifdef __cplusplus
}
#endif

#endif
