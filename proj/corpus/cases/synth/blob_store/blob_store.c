/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <string.h>
#include <tee_internal_api.h>

#define BLOB_MAX 64

static TEE_Result store_blob(uint32_t param_types, TEE_Param params[4])
{
    uint8_t blob[BLOB_MAX];
    uint32_t exp_pt = TEE_PARAM_TYPES(TEE_PARAM_TYPE_MEMREF_INPUT,
                                      TEE_PARAM_TYPE_NONE,
                                      TEE_PARAM_TYPE_NONE,
                                      TEE_PARAM_TYPE_NONE);

    if (param_types != exp_pt)
        return TEE_ERROR_BAD_PARAMETERS;

    memcpy(blob, params[0].memref.buffer, params[0].memref.size);
    return TEE_SUCCESS;
}
