/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

#define SDP_META_VERSION 1

struct sdp_meta {
    uint32_t version;
    uint32_t flags;
    char owner[64];
};

TEE_Result sdp_store_meta(TEE_Param params[4])
{
    struct sdp_meta meta;
    char owner[64];

    meta.version = params[0].value.a;
    meta.flags = params[0].value.b;
    if (meta.version > SDP_META_VERSION)
        return TEE_ERROR_NOT_SUPPORTED;
    TEE_MemMove(owner, params[1].memref.buffer, params[1].memref.size);
    return TEE_SUCCESS;
}
