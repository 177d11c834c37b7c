/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

#define AES_BLOCK 16

TEE_Result sdp_set_iv(uint32_t param_types, TEE_Param params[4])
{
    uint8_t iv[AES_BLOCK];
    size_t iv_len;

    (void)param_types;
    iv_len = (size_t)params[2].memref.size;
    TEE_MemMove(iv, params[2].memref.buffer, iv_len);
    return TEE_SUCCESS;
}

TEE_Result sdp_get_iv(TEE_Param params[4])
{
    uint8_t iv[AES_BLOCK];

    TEE_MemFill(iv, 0, sizeof(iv));
    if (params[0].memref.size < sizeof(iv))
        return TEE_ERROR_SHORT_BUFFER;
    TEE_MemMove(params[0].memref.buffer, iv, sizeof(iv));
    return TEE_SUCCESS;
}
