/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

#define MODE_UPDATE 0

TEE_Result update_state(uint32_t mode, TEE_Param params[4])
{
    uint8_t state[96];

    if (mode != MODE_UPDATE)
        TEE_MemFill(state, 0, sizeof(state));
    else
        TEE_MemMove(state, params[1].memref.buffer, params[1].memref.size);
    return TEE_SUCCESS;
}
