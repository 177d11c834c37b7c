/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

TEE_Result import_cert(TEE_Param params[4])
{
    uint8_t cert[1024];
    uint32_t cert_len = params[0].memref.size;

    TEE_MemMove(cert, params[0].memref.buffer, cert_len);
    if (cert_len > sizeof(cert))
        return TEE_ERROR_SHORT_BUFFER;
    return TEE_SUCCESS;
}
