void fmu_step(long param_1, double param_2)
{
  *(double *)(param_1 + 0x20) =
      -(*(double *)(param_1 + 0x18) - *(double *)(param_1 + 0x10));
  double dVar1 = *(double *)(param_1 + 0x20);
  double dVar2 = dVar1 * 1.25;
  *(double *)(param_1 + 0x30) = dVar2;
  double dVar3 = *(double *)(param_1 + 0x28);
  double dVar4 = dVar3 * 0.8;
  *(double *)(param_1 + 0x38) = dVar4;
  double dVar5 = *(double *)(param_1 + 0x30);
  double dVar6 = *(double *)(param_1 + 0x38);
  *(double *)(param_1 + 0x40) = dVar5 + dVar6;
  double dVar7 = *(double *)(param_1 + 0x40) * 0.5;
  *(double *)(param_1 + 0x48) = dVar7;
  double dVar8 = *(double *)(param_1 + 0x20) * 0.1;
  double dVar9 = *(double *)(param_1 + 0x48);
  *(double *)(param_1 + 0x50) = -(dVar8 - dVar9);
  double dVar10 = *(double *)(param_1 + 0x50) * 0.05;
  double dVar11 = *(double *)(param_1 + 0x48);
  *(double *)(param_1 + 0x58) = dVar11 + dVar10;
  double dVar12 = *(double *)(param_1 + 0x20) * 0.5;
  double dVar13 = param_2 * dVar12;
  *(double *)(param_1 + 0x28) = *(double *)(param_1 + 0x28) + dVar13;
}
