/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <string.h>
#include <tee_internal_api.h>

#define SDP_CHUNK 4096

struct sdp_region {
    uint32_t id;
    uint32_t size;
    uint8_t data[SDP_CHUNK];
};

static struct sdp_region g_region;

TEE_Result sdp_inject_data(uint32_t param_types, TEE_Param params[4])
{
    uint8_t chunk[512];
    uint32_t exp_pt = TEE_PARAM_TYPES(TEE_PARAM_TYPE_MEMREF_INPUT,
                                      TEE_PARAM_TYPE_VALUE_INPUT,
                                      TEE_PARAM_TYPE_NONE,
                                      TEE_PARAM_TYPE_NONE);

    if (param_types != exp_pt)
        return TEE_ERROR_BAD_PARAMETERS;

    TEE_MemMove(chunk, params[0].memref.buffer, params[0].memref.size);
    g_region.id = params[1].value.a;
    return TEE_SUCCESS;
}
