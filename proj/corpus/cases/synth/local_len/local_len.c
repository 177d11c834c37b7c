/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

TEE_Result set_label(TEE_Param params[4])
{
    char label[32];
    size_t len;
    void *src;

    src = params[1].memref.buffer;
    len = params[1].memref.size;
    if (src == NULL)
        return TEE_ERROR_BAD_PARAMETERS;
    TEE_MemMove(label, src, len);
    return TEE_SUCCESS;
}
