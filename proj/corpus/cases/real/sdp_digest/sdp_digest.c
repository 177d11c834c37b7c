/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

#define DIGEST_MAX 64

TEE_Result sdp_update_digest(uint32_t param_types, TEE_Param params[4])
{
    uint8_t digest[DIGEST_MAX];
    uint32_t dlen;

    if (TEE_PARAM_TYPE_GET(param_types, 0) != TEE_PARAM_TYPE_VALUE_INPUT)
        return TEE_ERROR_BAD_PARAMETERS;

    dlen = params[0].value.b;
    TEE_MemMove(digest, params[1].memref.buffer, dlen);
    return TEE_SUCCESS;
}
