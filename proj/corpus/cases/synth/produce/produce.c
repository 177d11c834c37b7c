/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

#define CMD_PRODUCE 0

void produce(TEE_Param params[4])
{
    char str[512];
    TEE_MemMove(str, params[0].memref.buffer, params[0].memref.size);
}

TEE_Result TA_InvokeCommandEntryPoint(void *session, uint32_t cmd,
                                      uint32_t param_types, TEE_Param params[4])
{
    (void)session;
    (void)param_types;
    if (cmd == CMD_PRODUCE) {
        produce(params);
        return TEE_SUCCESS;
    }
    return TEE_ERROR_NOT_SUPPORTED;
}
