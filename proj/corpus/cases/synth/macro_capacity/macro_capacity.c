/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

#define IV_SIZE 16

static uint8_t g_iv_store[IV_SIZE];

TEE_Result set_iv(TEE_Param params[4])
{
    uint8_t iv[IV_SIZE];
    uint32_t iv_len = params[0].value.b;

    TEE_MemMove(iv, params[1].memref.buffer, iv_len);
    TEE_MemMove(g_iv_store, iv, IV_SIZE);
    return TEE_SUCCESS;
}
