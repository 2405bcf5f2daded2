void fmi2Initialize(long param_1)
{
  *(double *)(param_1 + 0x30) = 0.0;
  *(double *)(param_1 + 0x38) = 0.0;
}

void fmi2DoStep(long param_1, double param_2)
{
  double dVar1 = *(double *)(param_1 + 0x18);
  double dVar2 = *(double *)(param_1 + 0x10) - dVar1;
  *(double *)(param_1 + 0x28) = dVar2;
  double dVar3 = *(double *)(param_1 + 0x28);
  double dVar4 = dVar3 * 1.75;
  *(double *)(param_1 + 0x40) = dVar4;
  double dVar5 = *(double *)(param_1 + 0x20);
  double dVar6 = dVar5 * 0.6;
  *(double *)(param_1 + 0x48) = dVar6;
  double dVar7 = *(double *)(param_1 + 0x28) - *(double *)(param_1 + 0x30);
  double dVar8 = dVar7 * 3.5;
  *(double *)(param_1 + 0x50) = dVar8;
  double dVar9 = *(double *)(param_1 + 0x38);
  double dVar10 = dVar9 * 0.4;
  *(double *)(param_1 + 0x58) = dVar10;
  double dVar11 = *(double *)(param_1 + 0x40) + *(double *)(param_1 + 0x58);
  *(double *)(param_1 + 0x60) = dVar11 + *(double *)(param_1 + 0x50);
  double dVar12 = *(double *)(param_1 + 0x60) + *(double *)(param_1 + 0x48);
  *(double *)(param_1 + 0x68) = dVar12 + *(double *)(param_1 + 0x98);
  if (*(bool *)(param_1 + 0x70)) {
    *(double *)(param_1 + 0x78) =
        fmax(fmin(*(double *)(param_1 + 0x68), 1.5), -1.5);
  } else {
    *(double *)(param_1 + 0x78) = 0.0;
  }
  double dVar13 = *(double *)(param_1 + 0x68) - *(double *)(param_1 + 0x78);
  *(double *)(param_1 + 0x80) = dVar13;
  double dVar14 = *(double *)(param_1 + 0x80) * 0.8;
  *(double *)(param_1 + 0x88) = -dVar14;
  double dVar15 = *(double *)(param_1 + 0x78) * 0.5;
  *(double *)(param_1 + 0x90) = dVar15;
  double dVar16 = *(double *)(param_1 + 0x28) * 0.8;
  double dVar17 = *(double *)(param_1 + 0x88) * 0.5;
  double dVar18 = dVar16 + dVar17;
  double dVar19 = param_2 * dVar18;
  *(double *)(param_1 + 0x38) = *(double *)(param_1 + 0x38) + dVar19;
  double dVar20 = *(double *)(param_1 + 0x28) - *(double *)(param_1 + 0x30);
  double dVar21 = param_2 * (dVar20 * 5.0);
  *(double *)(param_1 + 0x30) = *(double *)(param_1 + 0x30) + dVar21;
}
