/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

#define XFORM_BLOCK 256

static TEE_Result sdp_check_types(uint32_t pt)
{
    if (pt != TEE_PARAM_TYPES(TEE_PARAM_TYPE_MEMREF_INPUT,
                              TEE_PARAM_TYPE_MEMREF_OUTPUT,
                              TEE_PARAM_TYPE_NONE, TEE_PARAM_TYPE_NONE))
        return TEE_ERROR_BAD_PARAMETERS;
    return TEE_SUCCESS;
}

TEE_Result sdp_transform(uint32_t param_types, TEE_Param params[4])
{
    uint8_t work[XFORM_BLOCK];
    TEE_Result res;

    res = sdp_check_types(param_types);
    if (res != TEE_SUCCESS)
        return res;

    TEE_MemMove(work, params[0].memref.buffer, params[0].memref.size);
    if (params[1].memref.size < XFORM_BLOCK)
        return TEE_ERROR_SHORT_BUFFER;
    TEE_MemMove(params[1].memref.buffer, work, XFORM_BLOCK);
    params[1].memref.size = XFORM_BLOCK;
    return TEE_SUCCESS;
}
