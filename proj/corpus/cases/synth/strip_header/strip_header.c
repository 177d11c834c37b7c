/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

#define HDR_LEN 4

TEE_Result unwrap(TEE_Param params[4])
{
    uint8_t body[64];
    uint8_t *in = params[0].memref.buffer;
    uint32_t body_len;

    if (params[0].memref.size < HDR_LEN)
        return TEE_ERROR_BAD_PARAMETERS;
    body_len = params[0].memref.size - HDR_LEN;
    TEE_MemMove(body, in + HDR_LEN, body_len);
    return TEE_SUCCESS;
}
