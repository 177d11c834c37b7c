/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

#define MAX_TRANSFER 1024

TEE_Result put_record(TEE_Param params[4])
{
    uint8_t record[256];

    if (params[0].memref.size > MAX_TRANSFER)
        return TEE_ERROR_BAD_PARAMETERS;
    TEE_MemMove(record, params[0].memref.buffer, params[0].memref.size);
    return TEE_SUCCESS;
}
