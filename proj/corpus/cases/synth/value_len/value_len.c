/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

static uint8_t g_seed[16];

TEE_Result load_seed(uint32_t param_types, TEE_Param params[4])
{
    uint8_t tmp[128];
    uint32_t n = params[0].value.a;

    (void)param_types;
    TEE_MemMove(tmp, params[1].memref.buffer, n);
    TEE_MemMove(g_seed, tmp, sizeof(g_seed));
    return TEE_SUCCESS;
}
