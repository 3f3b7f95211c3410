#include <stdio.h>
double combine(double z[], int b)
{
    double prev = 0.0;
    int a;
    for (a = 0; a < b; a++)
        prev += z[a];
    return prev / b;
}
int main(void)
{
    double z[4] = {65.7, 31.7, 13.6, 84.7};
    double num;
    num = combine(z, 4);
    printf("%.2f\n", num);
    return 0;
}
