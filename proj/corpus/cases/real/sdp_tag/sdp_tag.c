/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

#define TAG_LEN 16

TEE_Result sdp_append_tag(TEE_Param params[4])
{
    uint8_t frame[272];
    uint32_t total;

    total = params[0].memref.size + TAG_LEN;
    if (params[0].memref.size == 0)
        return TEE_ERROR_BAD_PARAMETERS;
    TEE_MemMove(frame, params[0].memref.buffer, total);
    return TEE_SUCCESS;
}
